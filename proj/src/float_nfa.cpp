#include "qnnv/float_nfa.hpp"

#include "qnnv/error.hpp"

#include <algorithm>
#include <cstring>

namespace qnnv {

namespace {

std::int64_t exact_i64(const Rational& v, const char* what) {
    if (!v.is_integer() || !v.numerator().fits_slong_p()) {
        throw Error(ErrorCode::Internal, std::string(what) + " is not a 64-bit integer after scaling");
    }
    return v.numerator().get_si();
}

std::int64_t pow2_i64(long k) {
    if (k < 0 || k > 61) throw Error(ErrorCode::Internal, "scaled power of two out of range");
    return std::int64_t{1} << k;
}

}  // namespace

FloatFnnNfa::FloatFnnNfa(const Network& net, const FloatFormat& fmt, int exponent_cap)
    : p_(fmt.mantissa_bits), e_(fmt.exponent_bits), in_dim_(net.input_dim()), out_dim_(net.output_dim()) {
    fmt.validate();
    if (fmt.exponent_bits > exponent_cap) {
        throw Error(ErrorCode::ExponentWidthTooLarge, "exponent width " + std::to_string(fmt.exponent_bits) +
                                                          " exceeds the automaton cap " + std::to_string(exponent_cap));
    }
    if (fmt.rounding != RoundingMode::NearestHalfUp) {
        throw Error(ErrorCode::UnsupportedRounding, "floating-point automaton supports nearest rounding only");
    }
    if (net.depth() > 2) throw Error(ErrorCode::UnsupportedDepth, "floating-point automaton supports depth <= 2");
    if (!net.final_relu()) {
        throw Error(ErrorCode::UnsupportedNetwork, "floating-point automaton needs ReLU on the last layer");
    }
    if (!is_quantised(net, fmt)) {
        throw Error(ErrorCode::UnquantisedNetwork, "network parameters are not representable in " + to_string(fmt));
    }
    if (in_dim_ + out_dim_ > 63) throw Error(ErrorCode::InvalidArgument, "too many tracks for one symbol");
    const long emin = fmt.min_exponent();
    const long emax = fmt.max_exponent();
    k_ = static_cast<int>(std::max({static_cast<long>(p_) - 2 * emin, static_cast<long>(p_) + 2 - emin, 0L}));
    if (k_ + emax + 8 > 56) throw Error(ErrorCode::InvalidArgument, "format too wide for the floating-point automaton");
    hidden_count_ = net.depth() == 2 ? net.layer(0).rows : 0;
    tracks_ = in_dim_ + hidden_count_ + out_dim_;
    zero_threshold_ = pow2_i64(k_ + emin) - pow2_i64(k_ + emin - p_ - 2);

    const std::size_t fields = std::size_t{1} << e_;
    const std::int64_t top = pow2_i64(k_ + emax);
    for (std::size_t li = 0; li < net.depth(); ++li) {
        const Layer& l = net.layer(li);
        layer_sizes_.push_back(l.rows);
        const std::size_t in_base = li == 0 ? 0 : in_dim_;
        const bool hidden = li + 1 < net.depth();
        const std::size_t out_base = hidden ? in_dim_ : in_dim_ + hidden_count_;
        for (std::size_t r = 0; r < l.rows; ++r) {
            Neuron n;
            n.layer = li;
            n.hidden = hidden;
            n.out_track = out_base + r;
            std::int64_t hmax = top;
            for (std::size_t c = 0; c < l.cols; ++c) {
                n.in_tracks.push_back(in_base + c);
                std::vector<std::int64_t> per_field(fields, 0);
                for (std::size_t fld = 1; fld + 1 < fields; ++fld) {
                    const long exponent = static_cast<long>(fld) - fmt.bias();
                    per_field[fld] = exact_i64(l.weight(r, c).scaled_pow2(k_ + exponent), "weight");
                }
                std::int64_t biggest = 0;
                for (auto v : per_field) biggest = std::max(biggest, v < 0 ? -v : v);
                hmax += biggest;
                n.scaled_input.push_back(std::move(per_field));
            }
            n.scaled_bias = exact_i64(l.bias[r].scaled_pow2(k_), "bias");
            n.clamp = hmax + pow2_i64(k_ + emax - 1) + 1;
            neurons_.push_back(std::move(n));
        }
    }
}

std::int64_t FloatFnnNfa::power(std::uint8_t field) const {
    return std::int64_t{1} << (k_ + static_cast<int>(field) - ((1 << (e_ - 1)) - 1));
}

StateCode FloatFnnNfa::encode(const State& s) const {
    StateCode out;
    out.reserve(state_size());
    out.push_back(static_cast<char>(s.t));
    for (const auto& tr : s.tracks) {
        out.push_back(static_cast<char>(tr.sign));
        out.push_back(static_cast<char>(tr.field));
        out.push_back(static_cast<char>((tr.mant_nonzero ? 1 : 0) | (tr.mant_all_ones ? 2 : 0)));
    }
    for (const auto r : s.residual) {
        char buf[8];
        std::memcpy(buf, &r, 8);
        out.append(buf, 8);
    }
    return out;
}

FloatFnnNfa::State FloatFnnNfa::decode(const StateCode& q) const {
    State s;
    s.t = static_cast<unsigned char>(q[0]);
    s.tracks.resize(tracks_);
    std::size_t at = 1;
    for (auto& tr : s.tracks) {
        tr.sign = static_cast<std::uint8_t>(q[at]);
        tr.field = static_cast<std::uint8_t>(q[at + 1]);
        const auto flags = static_cast<unsigned char>(q[at + 2]);
        tr.mant_nonzero = (flags & 1) != 0;
        tr.mant_all_ones = (flags & 2) != 0;
        at += 3;
    }
    s.residual.resize(neurons_.size());
    for (auto& r : s.residual) {
        std::memcpy(&r, q.data() + at, 8);
        at += 8;
    }
    return s;
}

std::vector<StateCode> FloatFnnNfa::initial_states() const {
    const std::size_t options = (std::size_t{1} << e_) - 1;  // field 0 (zero) or a normal exponent
    std::vector<StateCode> out;
    std::vector<std::size_t> pick(hidden_count_, 0);
    while (true) {
        State s;
        s.tracks.resize(tracks_);
        s.residual.assign(neurons_.size(), 0);
        for (std::size_t h = 0; h < hidden_count_; ++h) s.tracks[in_dim_ + h].field = static_cast<std::uint8_t>(pick[h]);
        out.push_back(encode(s));
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == options) pick[i++] = 0;
        if (i == pick.size()) break;
    }
    return out;
}

std::size_t FloatFnnNfa::hidden_nonzero(const State& s) const {
    if (s.t <= static_cast<std::size_t>(e_)) return 0;
    std::size_t n = 0;
    for (std::size_t h = 0; h < hidden_count_; ++h) n += s.tracks[in_dim_ + h].field != 0;
    return n;
}

bool FloatFnnNfa::step(State& s, Symbol inputs, std::uint64_t hidden, Symbol outputs) const {
    const auto t = static_cast<int>(s.t);
    const std::size_t out_base = in_dim_ + hidden_count_;
    std::vector<std::uint8_t> bit(tracks_, 0);
    for (std::size_t j = 0; j < in_dim_; ++j) bit[j] = static_cast<std::uint8_t>(inputs >> j & 1);
    for (std::size_t k = 0; k < out_dim_; ++k) bit[out_base + k] = static_cast<std::uint8_t>(outputs >> k & 1);
    if (t > e_) {
        std::size_t g = 0;
        for (std::size_t h = 0; h < hidden_count_; ++h) {
            if (s.tracks[in_dim_ + h].field != 0) bit[in_dim_ + h] = static_cast<std::uint8_t>(hidden >> g++ & 1);
        }
    }
    for (std::size_t i = 0; i < tracks_; ++i) {
        const bool guessed = i >= in_dim_ && i < out_base;
        Track& tr = s.tracks[i];
        if (t == 0) {
            if (guessed) continue;
            tr.sign = bit[i];
            if (i >= out_base && tr.sign) return false;  // ReLU outputs are never negative
        } else if (t <= e_) {
            if (guessed) continue;
            tr.field = static_cast<std::uint8_t>(tr.field | (bit[i] << (t - 1)));
        } else {
            if (tr.field == 0 && bit[i]) return false;
            tr.mant_nonzero = tr.mant_nonzero || bit[i];
            tr.mant_all_ones = tr.mant_all_ones && bit[i];
        }
    }
    const std::uint8_t reserved = static_cast<std::uint8_t>((1 << e_) - 1);
    if (t == e_) {
        for (std::size_t i = 0; i < tracks_; ++i) {
            const Track& tr = s.tracks[i];
            if (tr.field == reserved || (tr.field == 0 && tr.sign)) return false;
        }
        for (std::size_t n = 0; n < neurons_.size(); ++n) {
            const Neuron& nr = neurons_[n];
            std::int64_t r = nr.scaled_bias;
            for (std::size_t c = 0; c < nr.in_tracks.size(); ++c) {
                const Track& in = s.tracks[nr.in_tracks[c]];
                const std::int64_t a = nr.scaled_input[c][in.field];
                r += in.sign ? -a : a;
            }
            const Track& out = s.tracks[nr.out_track];
            r -= out.field == 0 ? zero_threshold_ : power(out.field);
            s.residual[n] = std::clamp(r, -nr.clamp, nr.clamp);
        }
    } else if (t > e_) {
        for (std::size_t n = 0; n < neurons_.size(); ++n) {
            const Neuron& nr = neurons_[n];
            std::int64_t h = 0;
            for (std::size_t c = 0; c < nr.in_tracks.size(); ++c) {
                if (!bit[nr.in_tracks[c]]) continue;
                const Track& in = s.tracks[nr.in_tracks[c]];
                const std::int64_t a = nr.scaled_input[c][in.field];
                h += in.sign ? -a : a;
            }
            if (bit[nr.out_track]) h -= power(s.tracks[nr.out_track].field);
            s.residual[n] = std::clamp(2 * s.residual[n] + h, -nr.clamp, nr.clamp);
        }
    }
    s.t += 1;
    return t < e_ || viable(s);
}

bool FloatFnnNfa::viable(const State& s) const {
    const int remaining = static_cast<int>(word_length() - s.t);
    const std::int64_t scale = std::int64_t{1} << remaining;
    const std::uint8_t top_field = static_cast<std::uint8_t>((1 << e_) - 2);
    for (std::size_t n = 0; n < neurons_.size(); ++n) {
        const Neuron& nr = neurons_[n];
        const Track& out = s.tracks[nr.out_track];
        // Bounds on every later mantissa contribution h.
        std::int64_t hmin = 0, hmax = 0;
        for (std::size_t c = 0; c < nr.in_tracks.size(); ++c) {
            const Track& in = s.tracks[nr.in_tracks[c]];
            const std::int64_t a = in.sign ? -nr.scaled_input[c][in.field] : nr.scaled_input[c][in.field];
            (a < 0 ? hmin : hmax) += a;
        }
        if (out.field != 0) hmin -= power(out.field);
        const std::int64_t lo = scale * s.residual[n] + hmin * (scale - 1);
        const std::int64_t hi = scale * s.residual[n] + hmax * (scale - 1);
        if (out.field == 0) {
            if (lo >= 0) return false;
            continue;
        }
        const std::int64_t half = power(out.field) >> 1;
        const std::int64_t lower = out.mant_nonzero || remaining > 0 ? -half : -(half >> 1);
        const bool may_be_max = out.field == top_field && out.mant_all_ones;
        if (hi < lower || (!may_be_max && lo >= half)) return false;
    }
    return true;
}

bool FloatFnnNfa::is_final(const StateCode& q) const {
    const State s = decode(q);
    if (s.t != word_length()) return false;
    const std::uint8_t top_field = static_cast<std::uint8_t>((1 << e_) - 2);
    for (std::size_t n = 0; n < neurons_.size(); ++n) {
        const Track& out = s.tracks[neurons_[n].out_track];
        const std::int64_t r = s.residual[n];
        if (out.field == 0) {
            if (r >= 0) return false;
            continue;
        }
        // y = 2^E (1 + M 2^-p): z rounds to y iff z - y lies in
        // [-2^(E-p-1), 2^(E-p-1)), with the lower half-gap halved when M = 0
        // and no upper limit at the largest finite value.
        const std::int64_t half = power(out.field) >> 1;
        const std::int64_t lower = out.mant_nonzero ? -half : -(half >> 1);
        const bool is_max = out.field == top_field && out.mant_all_ones;
        if (r < lower || (!is_max && r >= half)) return false;
    }
    return true;
}

std::vector<StateCode> FloatFnnNfa::succ(const StateCode& q, Symbol s) const {
    std::vector<StateCode> out;
    const State base = decode(q);
    if (base.t >= word_length() || s >= symbol_count()) return out;
    const Symbol inputs = s & ((Symbol{1} << in_dim_) - 1);
    const Symbol outputs = s >> in_dim_;
    const std::size_t h = hidden_nonzero(base);
    for (std::uint64_t g = 0; g < (std::uint64_t{1} << h); ++g) {
        State next = base;
        if (step(next, inputs, g, outputs)) out.push_back(encode(next));
    }
    return out;
}

std::vector<std::pair<Symbol, StateCode>> FloatFnnNfa::outgoing(const StateCode& q) const {
    std::vector<std::pair<Symbol, StateCode>> out;
    const State base = decode(q);
    if (base.t >= word_length()) return out;
    const std::size_t h = hidden_nonzero(base);
    for (Symbol x = 0; x < (Symbol{1} << in_dim_); ++x) {
        for (Symbol y = 0; y < (Symbol{1} << out_dim_); ++y) {
            for (std::uint64_t g = 0; g < (std::uint64_t{1} << h); ++g) {
                State next = base;
                if (step(next, x, g, y)) out.emplace_back(x | (y << in_dim_), encode(next));
            }
        }
    }
    return out;
}

NfaPtr build_float_nfa(const Network& net, const FloatFormat& fmt, int exponent_cap) {
    return std::make_shared<FloatFnnNfa>(net, fmt, exponent_cap);
}

}  // namespace qnnv
