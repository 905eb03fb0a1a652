#include "qnnv/fixed_nfa.hpp"

#include "qnnv/error.hpp"

#include <cstring>

namespace qnnv {

namespace {

constexpr std::size_t kNeuronBytes = 19;

std::int64_t to_i64(const BigInt& v) {
    if (!v.fits_slong_p()) throw Error(ErrorCode::Internal, "scaled parameter exceeds 64 bits");
    return v.get_si();
}

std::int64_t floor_div2(std::int64_t d) { return d >= 0 ? d / 2 : -((-d + 1) / 2); }

void put_i64(StateCode& out, std::int64_t v) {
    char buf[8];
    std::memcpy(buf, &v, 8);
    out.append(buf, 8);
}

std::int64_t get_i64(const StateCode& in, std::size_t at) {
    std::int64_t v;
    std::memcpy(&v, in.data() + at, 8);
    return v;
}

/// Low b bits (two's complement) and the floor quotient by 2^b.
void split_threshold(const BigInt& a, int b, std::vector<std::uint8_t>& bits, std::int64_t& high) {
    BigInt modulus = 1;
    modulus <<= b;
    const BigInt hi = floor_div(a, modulus);
    const BigInt lo = a - hi * modulus;
    bits.assign(static_cast<std::size_t>(b), 0);
    for (int i = 0; i < b; ++i) bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(mpz_tstbit(lo.get_mpz_t(), i));
    high = to_i64(hi);
}

}  // namespace

FixedFnnNfa::FixedFnnNfa(const Network& net, const FixedFormat& fmt, bool full_tail)
    : b_(fmt.total_bits), f_(fmt.frac_bits), nearest_(fmt.rounding == RoundingMode::NearestHalfUp), full_tail_(full_tail),
      in_dim_(net.input_dim()), out_dim_(net.output_dim()) {
    fmt.validate();
    if (fmt.rounding != RoundingMode::TowardNegative && fmt.rounding != RoundingMode::NearestHalfUp) {
        throw Error(ErrorCode::UnsupportedRounding, "fixed-point automaton supports floor and nearest rounding only");
    }
    if (fmt.overflow != OverflowMode::Saturate) {
        throw Error(ErrorCode::UnsupportedOverflow, "fixed-point automaton supports saturating overflow only");
    }
    if (b_ > 40) throw Error(ErrorCode::InvalidArgument, "fixed-point automaton needs b <= 40");
    if (!is_quantised(net, fmt)) {
        throw Error(ErrorCode::UnquantisedNetwork, "network parameters are not representable in " + to_string(fmt));
    }
    if (in_dim_ + out_dim_ > 63) throw Error(ErrorCode::InvalidArgument, "too many tracks for one symbol");
    const BigInt h = nearest_ && f_ >= 1 ? BigInt(1) << static_cast<unsigned>(f_ - 1) : BigInt(0);
    const BigInt edge = BigInt(1) << static_cast<unsigned>(b_ - 1 + f_);
    std::int64_t max_abs_sum = 0;
    const ArithmeticFormat any_fmt = fmt;
    std::vector<std::pair<Rational, Rational>> ranges(in_dim_, {fmt.min_value(), fmt.max_value()});
    for (std::size_t li = 0; li < net.depth(); ++li) {
        const Layer& l = net.layer(li);
        layer_sizes_.push_back(l.rows);
        std::vector<std::pair<Rational, Rational>> next_ranges;
        for (std::size_t r = 0; r < l.rows; ++r) {
            Neuron n;
            n.layer = li;
            n.relu = net.has_relu(li);
            n.output = li + 1 == net.depth();
            std::int64_t abs_sum = 0;
            for (std::size_t c = 0; c < l.cols; ++c) {
                const Rational scaled = l.weight(r, c).scaled_pow2(f_);
                n.weights.push_back(to_i64(scaled.numerator()));
                abs_sum += n.weights.back() < 0 ? -n.weights.back() : n.weights.back();
            }
            max_abs_sum = std::max(max_abs_sum, abs_sum);
            n.bias_bits.resize(static_cast<std::size_t>(b_));
            for (int t = 0; t < b_; ++t) {
                n.bias_bits[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(weight_bit(net, fmt, li, r, l.cols, t));
            }
            // B * 2^f = bias * 2^(2f); its part above bit b - 1:
            n.bias_high = to_i64(l.bias[r].scaled_pow2(2 * f_ - b_).floor());
            split_threshold(BigInt(1), b_, n.thr_bits[0], n.thr_high[0]);
            split_threshold(edge - h, b_, n.thr_bits[1], n.thr_high[1]);
            split_threshold(-edge - h, b_, n.thr_bits[2], n.thr_high[2]);
            auto rest = [&](const std::vector<std::uint8_t>& bits, std::int64_t high) {
                std::vector<std::int64_t> out(static_cast<std::size_t>(b_) + 1);
                out[static_cast<std::size_t>(b_)] = high;
                for (int t = b_ - 1; t >= 0; --t) {
                    out[static_cast<std::size_t>(t)] = 2 * out[static_cast<std::size_t>(t) + 1] + bits[static_cast<std::size_t>(t)];
                }
                return out;
            };
            n.bias_rest = rest(n.bias_bits, n.bias_high);
            for (int k = 0; k < 3; ++k) n.thr_rest[k] = rest(n.thr_bits[k], n.thr_high[k]);

            Rational lo = l.bias[r], hi = l.bias[r];
            for (std::size_t c = 0; c < l.cols; ++c) {
                const Rational a = l.weight(r, c) * ranges[c].first;
                const Rational z = l.weight(r, c) * ranges[c].second;
                lo += std::min(a, z);
                hi += std::max(a, z);
            }
            const Rational rlo = round(lo, any_fmt), rhi = round(hi, any_fmt);
            if (n.relu) {
                if (hi.sign() >= 0 && rlo <= fmt.max_value()) n.cases.push_back(NeuronCase::Identity);
                if (lo.sign() <= 0) n.cases.push_back(NeuronCase::Zero);
                if (rhi > fmt.max_value()) n.cases.push_back(NeuronCase::PosOverflow);
            } else {
                if (rhi >= fmt.min_value() && rlo <= fmt.max_value()) n.cases.push_back(NeuronCase::Identity);
                if (rhi > fmt.max_value()) n.cases.push_back(NeuronCase::PosOverflow);
                if (rlo < fmt.min_value()) n.cases.push_back(NeuronCase::NegOverflow);
            }
            Rational qlo = quantize(lo, any_fmt), qhi = quantize(hi, any_fmt);
            if (n.relu) {
                qlo = std::max(qlo, Rational(0));
                qhi = std::max(qhi, Rational(0));
            }
            next_ranges.emplace_back(qlo, qhi);
            neurons_.push_back(std::move(n));
        }
        ranges = std::move(next_ranges);
    }
    carry_bound_ = max_abs_sum + (std::int64_t{1} << f_) + 4;
}

std::size_t FixedFnnNfa::state_size() const { return 1 + neurons_.size() * kNeuronBytes; }

StateCode FixedFnnNfa::encode_state(const FixedNfaState& s) const {
    StateCode out;
    out.reserve(state_size());
    out.push_back(static_cast<char>(s.t));
    for (const auto& n : s.neurons) {
        out.push_back(static_cast<char>(n.kase));
        out.push_back(static_cast<char>(n.c_init));
        put_i64(out, n.carry);
        put_i64(out, n.tail);
        out.push_back(static_cast<char>((n.ge ? 1 : 0) | (n.nonzero ? 2 : 0)));
    }
    return out;
}

FixedNfaState FixedFnnNfa::decode_state(const StateCode& q) const {
    FixedNfaState s;
    s.t = static_cast<unsigned char>(q[0]);
    s.neurons.resize(neurons_.size());
    std::size_t at = 1;
    for (auto& n : s.neurons) {
        n.kase = static_cast<NeuronCase>(q[at]);
        n.c_init = q[at + 1] != 0;
        n.carry = get_i64(q, at + 2);
        n.tail = get_i64(q, at + 10);
        const auto flags = static_cast<unsigned char>(q[at + 18]);
        n.ge = (flags & 1) != 0;
        n.nonzero = (flags & 2) != 0;
        at += kNeuronBytes;
    }
    return s;
}

std::vector<StateCode> FixedFnnNfa::initial_states() const {
    std::vector<StateCode> out;
    std::vector<std::size_t> pick(neurons_.size(), 0);
    while (true) {
        FixedNfaState s;
        for (std::size_t i = 0; i < neurons_.size(); ++i) {
            FixedNeuronState ns;
            ns.kase = neurons_[i].cases[pick[i]];
            s.neurons.push_back(ns);
        }
        if (viable(s)) out.push_back(encode_state(s));
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == neurons_[i].cases.size()) pick[i++] = 0;
        if (i == pick.size()) break;
    }
    return out;
}

std::size_t FixedFnnNfa::hidden_identity_count(const FixedNfaState& s) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < neurons_.size(); ++i) {
        if (!neurons_[i].output && s.neurons[i].kase == NeuronCase::Identity) ++k;
    }
    return k;
}

bool FixedFnnNfa::step(FixedNfaState& s, Symbol inputs, std::uint64_t hidden, Symbol outputs) const {
    const auto t = static_cast<int>(s.t);
    const std::int64_t sign = t == b_ - 1 ? -1 : 1;
    const std::int64_t scale = std::int64_t{1} << f_;
    Symbol prev = inputs;
    std::size_t idx = 0;
    std::size_t guess = 0;
    for (std::size_t li = 0; li < layer_sizes_.size(); ++li) {
        Symbol cur = 0;
        for (std::size_t r = 0; r < layer_sizes_[li]; ++r, ++idx) {
            const Neuron& n = neurons_[idx];
            FixedNeuronState& ns = s.neurons[idx];
            std::int64_t d = ns.carry + n.bias_bits[static_cast<std::size_t>(t)];
            std::int64_t in_sum = 0;
            for (std::size_t j = 0; j < n.weights.size(); ++j) {
                if (prev >> j & 1) in_sum += n.weights[j];
            }
            d += sign * in_sum;
            int o = 0;
            switch (ns.kase) {
            case NeuronCase::Identity:
                if (t == f_) {
                    // The tail below 2^f is complete here, which fixes the increment.
                    ns.c_init = nearest_ && f_ >= 1 && ns.tail >= (std::int64_t{1} << (f_ - 1));
                    d += ns.c_init ? 1 : 0;
                }
                o = n.output ? static_cast<int>(outputs >> r & 1) : static_cast<int>(hidden >> guess++ & 1);
                d -= sign * scale * o;
                break;
            case NeuronCase::Zero: o = 0; break;
            case NeuronCase::PosOverflow: o = t < b_ - 1 ? 1 : 0; break;
            case NeuronCase::NegOverflow: o = t == b_ - 1 ? 1 : 0; break;
            }
            if (n.output && o != static_cast<int>(outputs >> r & 1)) return false;
            const int e = static_cast<int>(d & 1);
            ns.carry = floor_div2(d);
            if (ns.carry > carry_bound_ || -ns.carry > carry_bound_) {
                throw Error(ErrorCode::Internal, "carry " + std::to_string(ns.carry) + " exceeds its bound");
            }
            if (ns.kase == NeuronCase::Identity) {
                if (t < f_) {
                    // Only bit f-1 decides the increment; lower bits just split states.
                    if (full_tail_ || (nearest_ && t == f_ - 1)) ns.tail |= static_cast<std::int64_t>(e) << t;
                } else if (e != 0) {
                    return false;
                }
                if (o) ns.nonzero = true;
                if (n.relu && t == b_ - 1 && o) return false;
            } else {
                const int k = static_cast<int>(ns.kase) - 1;
                const int a = n.thr_bits[k][static_cast<std::size_t>(t)];
                ns.ge = e > a || (e == a && ns.ge);
            }
            cur |= static_cast<Symbol>(o) << r;
        }
        prev = cur;
    }
    s.t += 1;
    return true;
}

bool FixedFnnNfa::final_ok(const Neuron& n, const FixedNeuronState& s) const {
    std::int64_t c = s.carry + n.bias_high;
    if (s.kase == NeuronCase::Identity) {
        bool c_init = s.c_init;
        if (f_ == b_) {
            c_init = nearest_ && f_ >= 1 && s.tail >= (std::int64_t{1} << (f_ - 1));
            c += c_init ? 1 : 0;
        }
        if (c != 0) return false;
        // Active ReLU needs a non-negative sum: Y >= c_init.
        return !(n.relu && c_init && !s.nonzero);
    }
    const int k = static_cast<int>(s.kase) - 1;
    const bool at_least = c > n.thr_high[k] || (c == n.thr_high[k] && s.ge);
    return s.kase == NeuronCase::PosOverflow ? at_least : !at_least;
}

bool FixedFnnNfa::viable(const FixedNfaState& s) const {
    const auto t = static_cast<int>(s.t);
    const int r = b_ - t;
    if (r <= 0 || in_dim_ * static_cast<std::size_t>(r) > kViableBits) return true;
    // Values are taken relative to 2^t: a suffix of bits t..b-1, sign bit negative.
    const std::int64_t top = std::int64_t{1} << (r - 1);
    const std::int64_t scale = std::int64_t{1} << f_;
    auto floor_mod = [](std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; };
    auto floor_div = [&](std::int64_t a, std::int64_t m) { return (a - floor_mod(a, m)) / m; };
    std::vector<std::int64_t> prev(in_dim_), cur;
    const std::uint64_t per_input = std::uint64_t{1} << r;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << (in_dim_ * static_cast<std::size_t>(r))); ++code) {
        for (std::size_t j = 0; j < in_dim_; ++j) {
            const auto bits = static_cast<std::int64_t>(code >> (j * static_cast<std::size_t>(r)) & (per_input - 1));
            prev[j] = bits >= top ? bits - 2 * top : bits;
        }
        bool ok = true;
        std::size_t idx = 0;
        for (std::size_t li = 0; ok && li < layer_sizes_.size(); ++li) {
            cur.assign(layer_sizes_[li], 0);
            for (std::size_t row = 0; ok && row < layer_sizes_[li]; ++row, ++idx) {
                const Neuron& n = neurons_[idx];
                const FixedNeuronState& ns = s.neurons[idx];
                std::int64_t v = ns.carry + n.bias_rest[static_cast<std::size_t>(t)];
                for (std::size_t j = 0; j < n.weights.size(); ++j) v += n.weights[j] * prev[j];
                if (ns.kase != NeuronCase::Identity) {
                    const int k = static_cast<int>(ns.kase) - 1;
                    const std::int64_t th = n.thr_rest[k][static_cast<std::size_t>(t)];
                    const bool at_least = v > th || (v == th && ns.ge);
                    ok = ns.kase == NeuronCase::PosOverflow ? at_least : !at_least;
                    cur[row] = ns.kase == NeuronCase::Zero ? 0 : ns.kase == NeuronCase::PosOverflow ? top - 1 : -top;
                    continue;
                }
                bool c_init = ns.c_init;
                if (nearest_ && f_ >= 1 && t <= f_) {
                    c_init = t == f_ ? ns.tail >= (std::int64_t{1} << (f_ - 1)) : (floor_div(v, std::int64_t{1} << (f_ - 1 - t)) & 1) != 0;
                    if (t < f_ || f_ < b_) v += c_init ? std::int64_t{1} << (f_ - t) : 0;
                }
                const std::int64_t o = floor_div(v, scale);
                const int low = f_ > t ? f_ - t : 0;
                ok = floor_mod(v, scale) < (std::int64_t{1} << low) && o >= (n.relu ? 0 : -top) && o < top &&
                     !(n.relu && c_init && !ns.nonzero && o == 0);
                cur[row] = o;
            }
            prev.swap(cur);
        }
        if (ok) return true;
    }
    return false;
}

bool FixedFnnNfa::is_final(const StateCode& q) const {
    const FixedNfaState s = decode_state(q);
    if (s.t != static_cast<std::size_t>(b_)) return false;
    for (std::size_t i = 0; i < neurons_.size(); ++i) {
        if (!final_ok(neurons_[i], s.neurons[i])) return false;
    }
    return true;
}

std::vector<StateCode> FixedFnnNfa::succ(const StateCode& q, Symbol s) const {
    std::vector<StateCode> out;
    const FixedNfaState base = decode_state(q);
    if (base.t >= static_cast<std::size_t>(b_) || s >= symbol_count()) return out;
    const Symbol inputs = s & ((Symbol{1} << in_dim_) - 1);
    const Symbol outputs = s >> in_dim_;
    const std::size_t h = hidden_identity_count(base);
    for (std::uint64_t g = 0; g < (std::uint64_t{1} << h); ++g) {
        FixedNfaState next = base;
        if (step(next, inputs, g, outputs) && viable(next)) out.push_back(encode_state(next));
    }
    return out;
}

std::vector<std::pair<Symbol, StateCode>> FixedFnnNfa::outgoing(const StateCode& q) const {
    std::vector<std::pair<Symbol, StateCode>> out;
    const FixedNfaState base = decode_state(q);
    if (base.t >= static_cast<std::size_t>(b_)) return out;
    const std::size_t h = hidden_identity_count(base);
    // Output bits of non-identity neurons are fixed; only identity ones vary.
    const auto t = static_cast<int>(base.t);
    Symbol fixed = 0, free = 0;
    const std::size_t first_out = neurons_.size() - out_dim_;
    for (std::size_t r = 0; r < out_dim_; ++r) {
        switch (base.neurons[first_out + r].kase) {
        case NeuronCase::Identity: free |= Symbol{1} << r; break;
        case NeuronCase::Zero: break;
        case NeuronCase::PosOverflow: fixed |= static_cast<Symbol>(t < b_ - 1) << r; break;
        case NeuronCase::NegOverflow: fixed |= static_cast<Symbol>(t == b_ - 1) << r; break;
        }
    }
    for (Symbol x = 0; x < (Symbol{1} << in_dim_); ++x) {
        // Iterates every subset of `free`, ending with the empty one.
        Symbol sub = free;
        while (true) {
            const Symbol y = fixed | sub;
            for (std::uint64_t g = 0; g < (std::uint64_t{1} << h); ++g) {
                FixedNfaState next = base;
                if (step(next, x, g, y) && viable(next)) out.emplace_back(x | (y << in_dim_), encode_state(next));
            }
            if (sub == 0) break;
            sub = (sub - 1) & free;
        }
    }
    return out;
}

NfaPtr build_fixed_nfa(const Network& net, const FixedFormat& fmt) {
    return std::make_shared<FixedFnnNfa>(net, fmt);
}

int weight_bit(const Network& net, const FixedFormat& fmt, std::size_t layer, std::size_t neuron,
               std::size_t input_index, long t) {
    if (layer >= net.depth()) throw Error(ErrorCode::IndexOutOfRange, "layer index out of range");
    const Layer& l = net.layer(layer);
    if (neuron >= l.rows || input_index > l.cols) throw Error(ErrorCode::IndexOutOfRange, "neuron or input out of range");
    if (t < 0 || t >= fmt.total_bits) throw Error(ErrorCode::IndexOutOfRange, "bit position out of range");
    const Rational& w = input_index == l.cols ? l.bias[neuron] : l.weight(neuron, input_index);
    const Rational q = quantize(w, fmt);
    // Bit t of 2^f * q is the bit of weight 2^(t - f) of q; the bias enters the
    // sum scaled once more by 2^f.
    const long shift = input_index == l.cols ? 2L * fmt.frac_bits : fmt.frac_bits;
    return getbit_fixed(q.numerator(), q.denominator(), t - shift);
}

}  // namespace qnnv
