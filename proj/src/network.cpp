#include "qnnv/network.hpp"

#include "qnnv/error.hpp"
#include "qnnv/text.hpp"

#include <sstream>

namespace qnnv {

Network::Network(std::vector<Layer> layers, bool final_relu)
    : layers_(std::move(layers)), final_relu_(final_relu) {
    if (layers_.empty()) {
        throw Error(ErrorCode::DimensionMismatch, "network needs at least one layer");
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer& l = layers_[i];
        if (l.rows == 0 || l.cols == 0) {
            throw Error(ErrorCode::DimensionMismatch, "layer " + std::to_string(i + 1) + " has an empty dimension");
        }
        if (l.weights.size() != l.rows * l.cols || l.bias.size() != l.rows) {
            throw Error(ErrorCode::DimensionMismatch,
                        "layer " + std::to_string(i + 1) + " parameter count does not match its shape");
        }
        if (i > 0 && layers_[i - 1].rows != l.cols) {
            throw Error(ErrorCode::DimensionMismatch,
                        "layer " + std::to_string(i) + " has " + std::to_string(layers_[i - 1].rows) +
                            " outputs but layer " + std::to_string(i + 1) + " expects " + std::to_string(l.cols));
        }
    }
}

std::size_t Network::relu_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        if (has_relu(i)) n += layers_[i].rows;
    }
    return n;
}

namespace {

void check_input(const Network& net, const RationalVector& x) {
    if (x.size() != net.input_dim()) {
        throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                                      " entries, network expects " + std::to_string(net.input_dim()));
    }
}

Rational affine(const Layer& l, std::size_t r, const RationalVector& in) {
    Rational acc = l.bias[r];
    for (std::size_t c = 0; c < l.cols; ++c) {
        if (!l.weight(r, c).is_zero()) acc += l.weight(r, c) * in[c];
    }
    return acc;
}

Rational relu(const Rational& v) { return v.sign() < 0 ? Rational(0) : v; }

}  // namespace

RationalVector eval_rational(const Network& net, const RationalVector& x) {
    check_input(net, x);
    RationalVector cur = x;
    for (std::size_t i = 0; i < net.depth(); ++i) {
        const Layer& l = net.layer(i);
        RationalVector next(l.rows);
        for (std::size_t r = 0; r < l.rows; ++r) {
            const Rational pre = affine(l, r, cur);
            next[r] = net.has_relu(i) ? relu(pre) : pre;
        }
        cur = std::move(next);
    }
    return cur;
}

bool is_quantised(const Network& net, const ArithmeticFormat& fmt) {
    for (const Layer& l : net.layers()) {
        for (const auto& w : l.weights) {
            if (!is_representable(w, fmt)) return false;
        }
        for (const auto& b : l.bias) {
            if (!is_representable(b, fmt)) return false;
        }
    }
    return true;
}

RationalVector eval_quantised(const Network& net, const RationalVector& x, const ArithmeticFormat& fmt,
                              QuantSemantics semantics) {
    check_input(net, x);
    if (!is_quantised(net, fmt)) {
        throw Error(ErrorCode::UnquantisedNetwork, "network parameters are not representable in " + to_string(fmt));
    }
    for (const auto& v : x) {
        if (!is_representable(v, fmt)) {
            throw Error(ErrorCode::UnrepresentableInput, v.to_string() + " is not representable in " + to_string(fmt));
        }
    }
    RationalVector cur = x;
    for (std::size_t i = 0; i < net.depth(); ++i) {
        const Layer& l = net.layer(i);
        RationalVector next(l.rows);
        for (std::size_t r = 0; r < l.rows; ++r) {
            Rational pre;
            if (semantics == QuantSemantics::PerNeuron) {
                pre = quantize(affine(l, r, cur), fmt);
            } else {
                pre = Rational(0);
                for (std::size_t c = 0; c < l.cols; ++c) {
                    pre = fmt_op(ArithOp::Add, pre, fmt_op(ArithOp::Mul, l.weight(r, c), cur[c], fmt), fmt);
                }
                pre = fmt_op(ArithOp::Add, pre, l.bias[r], fmt);
            }
            // max(0, v) is closed on every format, no rounding needed.
            next[r] = net.has_relu(i) ? relu(pre) : pre;
        }
        cur = std::move(next);
    }
    return cur;
}

Network quantise(const Network& net, const ArithmeticFormat& fmt) {
    std::vector<Layer> layers = net.layers();
    for (Layer& l : layers) {
        for (auto& w : l.weights) w = quantize(w, fmt);
        for (auto& b : l.bias) b = quantize(b, fmt);
    }
    return Network(std::move(layers), net.final_relu());
}

PatternEvaluation eval_with_pattern(const Network& net, const RationalVector& x, const ActivationPattern& w) {
    check_input(net, x);
    if (w.bits.size() != net.relu_count()) {
        throw Error(ErrorCode::DimensionMismatch, "activation pattern has " + std::to_string(w.bits.size()) +
                                                      " bits, network has " + std::to_string(net.relu_count()) +
                                                      " ReLU nodes");
    }
    PatternEvaluation out;
    RationalVector cur = x;
    std::size_t node = 0;
    for (std::size_t i = 0; i < net.depth(); ++i) {
        const Layer& l = net.layer(i);
        RationalVector next(l.rows);
        for (std::size_t r = 0; r < l.rows; ++r) {
            const Rational pre = affine(l, r, cur);
            if (!net.has_relu(i)) {
                next[r] = pre;
                continue;
            }
            const bool active = w.bits[node++] != 0;
            if (active ? pre.sign() < 0 : pre.sign() > 0) out.consistent = false;
            next[r] = active ? pre : Rational(0);
        }
        cur = std::move(next);
    }
    out.output = std::move(cur);
    return out;
}

ActivationPattern induced_pattern(const Network& net, const RationalVector& x) {
    check_input(net, x);
    ActivationPattern w;
    RationalVector cur = x;
    for (std::size_t i = 0; i < net.depth(); ++i) {
        const Layer& l = net.layer(i);
        RationalVector next(l.rows);
        for (std::size_t r = 0; r < l.rows; ++r) {
            const Rational pre = affine(l, r, cur);
            if (net.has_relu(i)) w.bits.push_back(pre.sign() >= 0 ? 1 : 0);
            next[r] = net.has_relu(i) ? relu(pre) : pre;
        }
        cur = std::move(next);
    }
    return w;
}

Network parse_network(std::string_view text) {
    LineReader reader(text);
    auto line = reader.next();
    if (line && line->text == "format=1") line = reader.next();
    if (!line) throw Error(ErrorCode::SyntaxError, "empty network file");
    const auto header = split_ws(line->text);
    if (header.empty() || header[0] != "fnn") {
        throw Error(ErrorCode::SyntaxError, reader.where(*line) + "expected 'fnn' header");
    }
    long depth = -1;
    std::vector<std::size_t> dims;
    bool final_relu = true;
    for (std::size_t i = 1; i < header.size(); ++i) {
        const auto& kv = header[i];
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::SyntaxError, reader.where(*line) + "malformed header field '" + kv + "'");
        }
        const auto key = kv.substr(0, eq);
        const auto val = kv.substr(eq + 1);
        if (key == "k") {
            depth = parse_count(val, reader.where(*line));
        } else if (key == "dims") {
            for (const auto& d : split(val, ',')) dims.push_back(parse_count(d, reader.where(*line)));
        } else if (key == "final_relu") {
            if (val != "0" && val != "1") {
                throw Error(ErrorCode::SyntaxError, reader.where(*line) + "final_relu must be 0 or 1");
            }
            final_relu = val == "1";
        } else {
            throw Error(ErrorCode::SyntaxError, reader.where(*line) + "unknown header field '" + key + "'");
        }
    }
    if (depth < 1 || dims.size() != static_cast<std::size_t>(depth) + 1) {
        throw Error(ErrorCode::SyntaxError, reader.where(*line) + "header needs k >= 1 and k+1 dims");
    }
    std::vector<Layer> layers;
    for (long i = 0; i < depth; ++i) {
        Layer l;
        l.cols = dims[i];
        l.rows = dims[i + 1];
        auto tag = reader.next();
        if (!tag || tag->text != "layer " + std::to_string(i + 1)) {
            throw Error(ErrorCode::SyntaxError,
                        (tag ? reader.where(*tag) : std::string("end of file: ")) + "expected 'layer " +
                            std::to_string(i + 1) + "'");
        }
        for (std::size_t r = 0; r < l.rows; ++r) {
            auto row = reader.next();
            if (!row) throw Error(ErrorCode::SyntaxError, "end of file inside layer " + std::to_string(i + 1));
            const auto vals = parse_rationals(split_ws(row->text), reader.where(*row));
            if (vals.size() != l.cols) {
                throw Error(ErrorCode::DimensionMismatch, reader.where(*row) + "row has " + std::to_string(vals.size()) +
                                                              " entries, expected " + std::to_string(l.cols));
            }
            l.weights.insert(l.weights.end(), vals.begin(), vals.end());
        }
        auto bias = reader.next();
        if (!bias) throw Error(ErrorCode::SyntaxError, "end of file before bias of layer " + std::to_string(i + 1));
        auto parts = split_ws(bias->text);
        if (parts.empty() || parts[0] != "bias") {
            throw Error(ErrorCode::SyntaxError, reader.where(*bias) + "expected 'bias' row");
        }
        parts.erase(parts.begin());
        l.bias = parse_rationals(parts, reader.where(*bias));
        if (l.bias.size() != l.rows) {
            throw Error(ErrorCode::DimensionMismatch, reader.where(*bias) + "bias has " + std::to_string(l.bias.size()) +
                                                          " entries, expected " + std::to_string(l.rows));
        }
        layers.push_back(std::move(l));
    }
    if (auto extra = reader.next()) {
        throw Error(ErrorCode::SyntaxError, reader.where(*extra) + "trailing content after last layer");
    }
    return Network(std::move(layers), final_relu);
}

std::string write_network(const Network& net) {
    std::ostringstream os;
    os << "format=1\n";
    os << "fnn k=" << net.depth() << " dims=" << net.input_dim();
    for (const Layer& l : net.layers()) os << ',' << l.rows;
    if (!net.final_relu()) os << " final_relu=0";
    os << '\n';
    for (std::size_t i = 0; i < net.depth(); ++i) {
        const Layer& l = net.layer(i);
        os << "layer " << i + 1 << '\n';
        for (std::size_t r = 0; r < l.rows; ++r) {
            for (std::size_t c = 0; c < l.cols; ++c) os << (c ? " " : "") << l.weight(r, c);
            os << '\n';
        }
        os << "bias";
        for (const auto& b : l.bias) os << ' ' << b;
        os << '\n';
    }
    return os.str();
}

}  // namespace qnnv
