// qnnv: reachability of quantised ReLU networks.
//
// Exit codes: 0 completed (the verdict is in the output), 1 usage or input
// error, 2 resource verdict, 3 selfcheck disagreement.

#include "CLI11.hpp"

#include "qnnv/arithmetic.hpp"
#include "qnnv/bv.hpp"
#include "qnnv/error.hpp"
#include "qnnv/lp.hpp"
#include "qnnv/network.hpp"
#include "qnnv/reduction.hpp"
#include "qnnv/selfcheck.hpp"
#include "qnnv/text.hpp"
#include "qnnv/verifier.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace qnnv;

namespace {

constexpr int kUsage = 1;
constexpr int kResource = 2;
constexpr int kDisagree = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
}

/// Parse errors get the file name in front.
template <typename F>
auto with_file(const std::string& path, F&& parse) {
    const std::string text = read_file(path);
    try {
        return parse(text);
    } catch (const Error& e) {
        throw Error(e.code(), path + ": " + e.what());
    }
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
}

/// Witness words as a bit matrix, one track per line, kept as comments so
/// the record still parses.
std::string witness_block(const Verdict& v) {
    if (!v.valid() || !v.format) return "";
    std::ostringstream os;
    os << "# witness words, one track per line in word order (" << to_string(*v.format) << ")\n";
    for (std::size_t i = 0; i < v.input->size(); ++i) {
        os << "# x" << i + 1 << ' ' << encode((*v.input)[i], *v.format).to_string() << '\n';
    }
    for (std::size_t i = 0; i < v.output->size(); ++i) {
        os << "# y" << i + 1 << ' ' << encode((*v.output)[i], *v.format).to_string() << '\n';
    }
    return os.str();
}

struct EvalArgs {
    std::string net, input, arith, semantics = "per-neuron";
};

int run_eval(const EvalArgs& a) {
    const Network net = with_file(a.net, [](const std::string& t) { return parse_network(t); });
    const RationalVector x = parse_rational_list(a.input);
    std::ostringstream os;
    if (a.arith.empty()) {
        os << "output " << to_string(eval_rational(net, x)) << '\n';
    } else {
        const ArithmeticFormat fmt = parse_format(a.arith);
        const auto sem = a.semantics == "per-operation" ? QuantSemantics::PerOperation : QuantSemantics::PerNeuron;
        const RationalVector y = eval_quantised(net, x, fmt, sem);
        os << "output " << to_string(y) << '\n';
        os << "words";
        for (const auto& v : y) os << ' ' << encode(v, fmt).to_string();
        os << '\n';
    }
    std::cout << os.str();
    return 0;
}

struct QuantiseArgs {
    std::string net, arith, out;
};

int run_quantise(const QuantiseArgs& a) {
    const Network net = with_file(a.net, [](const std::string& t) { return parse_network(t); });
    emit(write_network(quantise(net, parse_format(a.arith))), a.out);
    return 0;
}

struct VerifyArgs {
    std::string problem, backend, net, spec, arith, out;
    bool witness = false;
    std::optional<std::uint64_t> max_inputs, max_patterns, max_states;
    std::optional<double> max_seconds;
    std::optional<int> e_cap;
};

int run_verify(const VerifyArgs& a) {
    const Problem problem = parse_problem(a.problem);
    Caps caps = Caps::from_env();
    if (a.max_inputs) caps.max_inputs = *a.max_inputs;
    if (a.max_patterns) caps.max_patterns = *a.max_patterns;
    if (a.max_states) caps.max_states = *a.max_states;
    if (a.max_seconds) caps.max_seconds = *a.max_seconds;
    if (a.e_cap) caps.float_exponent_cap = *a.e_cap;

    const Network net = with_file(a.net, [](const std::string& t) { return parse_network(t); });
    const bool lp_problem = problem == Problem::ReachQLp || problem == Problem::ReachFLp || problem == Problem::ReachLp;
    std::optional<ArithmeticFormat> fmt;
    if (problem != Problem::ReachQLp) {
        if (a.arith.empty()) throw Error(ErrorCode::InvalidArgument, "--arith is required for " + a.problem);
        fmt = parse_format(a.arith);
    }
    Backend backend = a.backend.empty() ? (problem == Problem::ReachQLp ? Backend::PatternLp : Backend::Brute)
                                        : parse_backend(a.backend);
    const bool allowed = problem == Problem::ReachQLp ? backend == Backend::PatternLp
                       : problem == Problem::ReachBv  ? backend != Backend::PatternLp
                                                      : backend == Backend::Brute;
    if (!allowed) {
        throw Error(ErrorCode::BackendUnavailable,
                    std::string(to_string(backend)) + " does not run " + std::string(to_string(problem)));
    }

    Verdict v;
    if (lp_problem) {
        const LpSpec spec = with_file(a.spec, [&](const std::string& t) {
            return parse_lp_spec(t, net.input_dim(), net.output_dim());
        });
        switch (problem) {
        case Problem::ReachQLp: v = reach_q_lp(net, spec.input, spec.output, caps); break;
        case Problem::ReachFLp: v = reach_f_lp(net, spec.input, spec.output, *fmt, caps); break;
        default: v = reach_lp(net, spec.input, spec.output, *fmt, caps); break;
        }
    } else {
        const BvSpec spec = with_file(a.spec, [&](const std::string& t) {
            return parse_bv_spec(t, net.input_dim(), net.output_dim());
        });
        if (problem == Problem::ReachFBv) {
            v = reach_f_bv(net, spec.input, spec.output, *fmt, caps);
        } else {
            const auto* fl = std::get_if<FloatFormat>(&*fmt);
            if (backend == Backend::Automata && fl && net.depth() > 2) {
                std::cerr << "warning: the floating-point automaton covers depth <= 2; using the brute backend\n";
                backend = Backend::Brute;
            }
            v = reach_bv(net, spec.input, spec.output, *fmt, backend, caps);
        }
    }
    emit(write_verdict(v) + (a.witness ? witness_block(v) : ""), a.out);
    return v.outcome == Outcome::Resource ? kResource : 0;
}

struct ReduceArgs {
    std::string dimacs, out_dir, gadget = "corrected";
    std::optional<unsigned> frac_bits;
};

int run_reduce(const ReduceArgs& a) {
    const Cnf3 cnf = with_file(a.dimacs, [](const std::string& t) { return parse_dimacs(t); });
    BinarityGadget gadget = BinarityGadget::Corrected;
    if (a.gadget == "as-printed") gadget = BinarityGadget::AsPrinted;
    else if (a.gadget != "corrected") throw Error(ErrorCode::InvalidArgument, "unknown gadget '" + a.gadget + "'");

    ReductionInstance inst;
    std::optional<FixedFormat> fmt;
    if (a.frac_bits) {
        auto q = reduce_quantised(cnf, *a.frac_bits, gadget);
        inst = std::move(q.instance);
        fmt = q.format;
    } else {
        inst = reduce(cnf, gadget);
    }
    const std::filesystem::path dir(a.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "network.fnn", write_network(inst.network));
    write_file(dir / "spec.lp", write_lp_spec({inst.input, inst.output}));
    std::cout << (dir / "network.fnn").string() << '\n' << (dir / "spec.lp").string() << '\n';
    if (fmt) {
        write_file(dir / "format.arith", to_string(ArithmeticFormat(*fmt)) + "\n");
        std::cout << (dir / "format.arith").string() << '\n';
    }
    return 0;
}

struct GetbitArgs {
    std::string value, arith;
    std::optional<long> t;
    std::optional<std::size_t> position;
};

int run_getbit(const GetbitArgs& a) {
    const Rational r = Rational::parse(a.value);
    if (a.arith.empty()) {
        if (!a.t) throw Error(ErrorCode::InvalidArgument, "fixed-point getbit needs --t");
        std::cout << getbit_fixed(r.numerator(), r.denominator(), *a.t) << '\n';
        return 0;
    }
    const ArithmeticFormat fmt = parse_format(a.arith);
    const auto* fl = std::get_if<FloatFormat>(&fmt);
    if (fl == nullptr) {
        // A fixed-point format selects word position i, weight 2^(i-f).
        if (!a.position) throw Error(ErrorCode::InvalidArgument, "getbit with --arith needs --position");
        const auto& fx = std::get<FixedFormat>(fmt);
        std::cout << getbit_fixed(r.numerator(), r.denominator(), static_cast<long>(*a.position) - fx.frac_bits)
                  << '\n';
        return 0;
    }
    if (!a.position) throw Error(ErrorCode::InvalidArgument, "getbit with --arith needs --position");
    std::cout << getbit_float(r.numerator(), r.denominator(), *fl, *a.position) << '\n';
    return 0;
}

int run_self(const SelfcheckOptions& opts) {
    const SelfcheckReport report = run_selfcheck(opts);
    for (const auto& c : report.cases) {
        std::cout << (c.agree ? "ok       " : "DISAGREE ") << c.name << "  " << c.detail << '\n';
    }
    const std::size_t bad = report.disagreements();
    std::cout << report.cases.size() - bad << "/" << report.cases.size() << " instances agree\n";
    return bad == 0 ? 0 : kDisagree;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reachability of quantised ReLU networks"};
    app.require_subcommand(1);

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Evaluate a network on one input");
    eval->add_option("--net", ev.net, "Network file")->required();
    eval->add_option("--input", ev.input, "Comma-separated rationals")->required();
    eval->add_option("--arith", ev.arith, "Arithmetic descriptor; exact rationals when absent");
    eval->add_option("--semantics", ev.semantics, "per-neuron or per-operation")
        ->check(CLI::IsMember({"per-neuron", "per-operation"}));

    QuantiseArgs qa;
    auto* quant = app.add_subcommand("quantise", "Round network parameters into a format");
    quant->add_option("--net", qa.net, "Network file")->required();
    quant->add_option("--arith", qa.arith, "Arithmetic descriptor")->required();
    quant->add_option("--out", qa.out, "Output file (stdout when absent)");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Decide a reachability problem");
    verify->add_option("--problem", va.problem, "reach-q-lp, reach-f-lp, reach-lp, reach-f-bv or reach-bv")
        ->required()
        ->check(CLI::IsMember({"reach-q-lp", "reach-f-lp", "reach-lp", "reach-f-bv", "reach-bv"}));
    verify->add_option("--backend", va.backend, "pattern_lp, brute or automata")
        ->check(CLI::IsMember({"pattern_lp", "brute", "automata"}));
    verify->add_option("--net", va.net, "Network file")->required();
    verify->add_option("--spec", va.spec, "LP or BV specification file")->required();
    verify->add_option("--arith", va.arith, "Arithmetic descriptor");
    verify->add_option("--out", va.out, "Write the verdict record here");
    verify->add_flag("--witness", va.witness, "Append the witness words as a commented bit matrix");
    verify->add_option("--max-inputs", va.max_inputs, "Input enumeration cap");
    verify->add_option("--max-patterns", va.max_patterns, "Activation pattern cap");
    verify->add_option("--max-states", va.max_states, "Explored automaton state cap");
    verify->add_option("--max-seconds", va.max_seconds, "Automaton exploration time budget");
    verify->add_option("--float-e-cap", va.e_cap, "Largest exponent width for the floating-point automaton");

    ReduceArgs ra;
    auto* red = app.add_subcommand("reduce", "Build a reachability instance from a 3-CNF formula");
    red->add_option("--dimacs", ra.dimacs, "DIMACS CNF file")->required();
    red->add_option("--out-dir", ra.out_dir, "Directory for the instance files")->required();
    red->add_option("--frac-bits", ra.frac_bits, "Also emit a fixed-point format with this many fractional bits");
    red->add_option("--gadget", ra.gadget, "corrected or as-printed")
        ->check(CLI::IsMember({"corrected", "as-printed"}));

    GetbitArgs ga;
    auto* getbit = app.add_subcommand("getbit", "One bit of a rational's binary representation");
    getbit->add_option("--value", ga.value, "Rational p/q")->required();
    getbit->add_option("--t", ga.t, "Bit weight exponent (fixed point, no format)");
    getbit->add_option("--arith", ga.arith, "Format selecting a word position");
    getbit->add_option("--position", ga.position, "Word position under --arith");

    SelfcheckOptions so;
    auto* self = app.add_subcommand("selfcheck", "Cross-backend agreement suite");
    self->add_option("--bv", so.bv_instances, "Random reach-bv instances");
    self->add_option("--cnf", so.cnf_instances, "Random 3-CNF instances");
    self->add_option("--seed", so.seed, "Generator seed");
    self->add_option("--jobs", so.jobs, "Worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*eval) return run_eval(ev);
        if (*quant) return run_quantise(qa);
        if (*verify) return run_verify(va);
        if (*red) return run_reduce(ra);
        if (*getbit) return run_getbit(ga);
        if (*self) return run_self(so);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
