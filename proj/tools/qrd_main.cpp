#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lab/lab.hpp"
#include "qrd/qrd.hpp"

namespace {

using json = nlohmann::json;
using namespace qrd;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitMalformed = 2;
constexpr int kExitDomain = 3;
constexpr int kExitNotWhitelisted = 4;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MalformedInput:
    case ErrorKind::NotPSD:
    case ErrorKind::ZeroOperator:
    case ErrorKind::DimMismatch:
        return kExitMalformed;
    case ErrorKind::KindNotWhitelisted:
        return kExitNotWhitelisted;
    default:
        return kExitDomain;
    }
}

json extended(const ExtendedReal& v) {
    if (v.is_infinite()) return "inf";
    return v.value();
}

HermitianOperator load_operator(const std::string& path) { return parse_operator(read_text_file(path)); }

// Parses "1,2.5,3" into numbers.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::MalformedInput, "bad grid entry '" + item + "'");
        }
    }
    if (out.empty()) throw Error(ErrorKind::BadParams, "grid is empty");
    return out;
}

DivergenceParams params_from(double alpha, const std::string& z) {
    if (z == "inf") return DivergenceParams::infinite(alpha);
    if (z == "0") return DivergenceParams::zero_limit(alpha);
    double value;
    try {
        value = std::stod(z);
    } catch (const std::exception&) {
        throw Error(ErrorKind::MalformedInput, "z must be a number, 0 or inf");
    }
    return DivergenceParams::finite(alpha, value);
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::MalformedInput, "cannot write " + path);
    out << text;
}

struct EvalArgs {
    std::string kind, rho, sigma, z;
    double alpha = 2;
    std::uint64_t seed = 0;
    int restarts = 8;
};

int run_eval(EvalArgs a, const lab::ExperimentConfig& config) {
    if (!config.kinds.empty()) a.kind = config.kinds.front();
    if (!config.alphas.empty()) a.alpha = config.alphas.front();
    if (!config.zs.empty()) a.z = lab::format_double(config.zs.front());
    if (config.seed) a.seed = *config.seed;
    const HermitianOperator rho = load_operator(a.rho), sigma = load_operator(a.sigma);
    json meta = {{"kind", a.kind}};
    ExtendedReal value;
    if (a.kind == "daz") {
        if (a.z.empty()) throw Error(ErrorKind::BadParams, "--z is required for kind daz");
        const DivergenceParams p = params_from(a.alpha, a.z);
        const DivergenceValue v = d_alpha_z(rho, sigma, p);
        value = v.d_value;
        meta["params"] = p.describe();
        meta["q_value"] = extended(v.q_value);
        meta["flags"] = v.flags;
    } else if (a.kind == "dinf") {
        const DivergenceValue v = d_alpha_z(rho, sigma, DivergenceParams::infinite(a.alpha));
        value = v.d_value;
        meta["flags"] = v.flags;
    } else if (a.kind == "dmax") {
        value = d_max(rho, sigma);
    } else if (a.kind == "umegaki") {
        value = umegaki(rho, sigma);
    } else if (a.kind == "dhat") {
        const DHatResult r = d_hat_alpha(rho, sigma, a.alpha);
        value = r.value;
        meta["exact"] = r.exact;
    } else if (a.kind == "dzero") {
        const ZeroLimitResult r = d_alpha_zero(rho, sigma, a.alpha);
        value = r.value;
        meta["extrapolated"] = r.extrapolated;
    } else if (a.kind == "measured" || a.kind == "test") {
        const MeasuredResult r = a.kind == "measured" ? measured_renyi_lower(rho, sigma, a.alpha, a.restarts, a.seed)
                                                      : test_measured(rho, sigma, a.alpha, a.restarts, a.seed);
        value = r.value;
        meta["restarts_used"] = r.restarts_used;
        meta["converged"] = r.converged;
        meta["outcomes"] = r.povm.size();
    } else {
        throw Error(ErrorKind::BadParams, "unknown kind '" + a.kind + "'");
    }
    if (a.kind != "dmax" && a.kind != "umegaki") meta["alpha"] = a.alpha;
    std::cout << json{{"value", extended(value)}, {"metadata", meta}}.dump() << "\n";
    return 0;
}

struct SweepArgs {
    std::string rho, sigma, alphas, z_mode = "alpha", output;
    double z = 1, kappa = 1;
};

int run_sweep(SweepArgs a, const lab::ExperimentConfig& config) {
    std::vector<double> grid = config.alphas.empty() ? parse_grid(a.alphas) : config.alphas;
    if (!config.output_path.empty()) a.output = config.output_path;
    const HermitianOperator rho = load_operator(a.rho), sigma = load_operator(a.sigma);
    std::ostringstream csv;
    csv << "alpha,z,value\n";
    for (double alpha : grid) {
        double z;
        if (a.z_mode == "fixed") z = a.z;
        else if (a.z_mode == "alpha") z = alpha;
        else if (a.z_mode == "alpha-half") z = alpha / 2;
        else if (a.z_mode == "alpha-minus-1-over-kappa" || a.z_mode == "alpha-minus-1") z = (alpha - 1) / a.kappa;
        else throw Error(ErrorKind::BadParams, "unknown z-mode '" + a.z_mode + "'");
        const ExtendedReal v =
            alpha == 1.0 ? umegaki(rho, sigma) : d_alpha_z(rho, sigma, DivergenceParams::finite(alpha, z)).d_value;
        csv << lab::format_double(alpha) << "," << lab::format_double(z) << "," << lab::csv_cell(v) << "\n";
    }
    emit(csv.str(), a.output);
    return 0;
}

struct ChannelArgs {
    std::string n1, n2, kind = "sandwiched", alphas = "2", z;
    bool choi = false;
    int d_in = 0, d_out = 0, restarts = 32;
    std::uint64_t seed = 0;
};

Channel load_channel(const std::string& path, const ChannelArgs& a) {
    if (!a.choi) return parse_channel(read_text_file(path));
    if (a.d_in < 1 || a.d_out < 1) throw Error(ErrorKind::BadParams, "--choi needs --d-in and --d-out");
    return Channel::from_choi(load_operator(path), a.d_in, a.d_out);
}

int run_channel(ChannelArgs a, const lab::ExperimentConfig& config) {
    if (!config.kinds.empty()) a.kind = config.kinds.front();
    if (config.seed) a.seed = *config.seed;
    if (!config.zs.empty()) a.z = lab::format_double(config.zs.front());
    a.restarts = config.restarts != 8 ? config.restarts : a.restarts;
    const std::vector<double> grid = config.alphas.empty() ? parse_grid(a.alphas) : config.alphas;
    const Channel n1 = load_channel(a.n1, a), n2 = load_channel(a.n2, a);
    const ExtendedReal dmax = channel_dmax(n1, n2);
    json records = json::array();
    bool dominated = true;
    bool monotone = true;
    double previous = -INFINITY;
    for (double alpha : grid) {
        ChannelDivergenceSpec spec;
        if (a.kind == "petz") spec = sweep_spec(SweepFamily::Petz, alpha);
        else if (a.kind == "sandwiched") spec = sweep_spec(SweepFamily::Sandwiched, alpha);
        else if (a.kind == "measured") spec = ChannelDivergenceSpec::measured(alpha);
        else if (a.kind == "umegaki") spec = ChannelDivergenceSpec::umegaki();
        else if (a.kind == "dmax") spec = ChannelDivergenceSpec::dmax();
        else if (a.kind == "daz") spec = ChannelDivergenceSpec::alpha_z(params_from(alpha, a.z.empty() ? "1" : a.z));
        else throw Error(ErrorKind::BadParams, "unknown channel kind '" + a.kind + "'");
        const ChannelDivergenceResult r = channel_divergence(n1, n2, spec, a.restarts, a.seed);
        if (!(r.value <= dmax + 1e-9)) dominated = false;
        if (r.value.as_double() < previous - 1e-3) monotone = false;
        previous = r.value.as_double();
        records.push_back({{"alpha", alpha},
                           {"value", extended(r.value)},
                           {"restarts_used", r.restarts_used},
                           {"converged", r.converged}});
    }
    json out = {{"kind", a.kind},          {"channel_dmax", extended(dmax)}, {"records", records},
                {"domination_holds", dominated}, {"monotone_in_alpha", monotone}};
    std::cout << out.dump(2) << "\n";
    return dominated ? 0 : kExitVerifyFailed;
}

struct VerifyArgs {
    std::string suite, output;
    int trials = 20;
    std::optional<std::uint64_t> seed;
    bool timing = false;
};

int run_verify(VerifyArgs a, lab::ExperimentConfig config) {
    if (!config.suite.empty()) a.suite = config.suite;
    else config.suite = a.suite;
    if (a.seed && !config.seed) config.seed = a.seed;
    if (config.trials == 20) config.trials = a.trials;
    if (!config.output_path.empty()) a.output = config.output_path;
    config.validate(true);
    const lab::VerifySummary s = lab::run_verify(config.suite, config.trials, *config.seed, lab::thread_cap());
    if (config.format == "csv") {
        std::ostringstream csv;
        csv << "case,invariant,passed,detail\n";
        for (const auto& r : s.records)
            for (const auto& x : r.assertions)
                csv << r.case_id << "," << x.invariant << "," << (x.passed ? 1 : 0) << ",\"" << x.detail << "\"\n";
        emit(csv.str(), a.output);
    } else {
        emit(lab::summary_to_json(s, a.timing) + "\n", a.output);
    }
    std::cerr << "verify " << s.suite << ": " << (s.passed() ? "pass" : "FAIL") << " (" << s.failures
              << " failing assertions over " << s.trials << " trials)\n";
    return s.passed() ? 0 : kExitVerifyFailed;
}

struct FamilyArgs {
    std::string tag = "pure", out_rho, out_sigma;
    FamilySpec spec;
    double index = 0.25;
};

int run_family(FamilyArgs a) {
    a.spec.tag = FamilySpec::parse_tag(a.tag);
    const StatePair pair = generate(a.spec, a.index);
    if (!a.out_rho.empty()) emit(matrix_to_json(pair.rho.matrix()) + "\n", a.out_rho);
    if (!a.out_sigma.empty()) emit(matrix_to_json(pair.sigma.matrix()) + "\n", a.out_sigma);
    json out = {{"family", FamilySpec::tag_name(a.spec.tag)},
                {"index", a.index},
                {"rho", json::parse(matrix_to_json(pair.rho.matrix()))},
                {"sigma", json::parse(matrix_to_json(pair.sigma.matrix()))},
                {"identity_residual", pair.identity_residual}};
    std::cout << out.dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Renyi divergence toolkit.\n"
                 "JSON output writes +inf as the string \"inf\"; CSV output leaves the cell empty.\n"
                 "Exit codes: 0 ok, 1 verification failure, 2 malformed input, 3 parameter-domain error,\n"
                 "4 divergence kind not allowed for channels. QRD_THREADS caps worker threads."};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON experiment config overriding flags");

    EvalArgs eval;
    auto* e = app.add_subcommand("eval", "Evaluate one divergence of two operators");
    e->add_option("--kind", eval.kind, "daz|dmax|umegaki|dhat|dzero|dinf|measured|test")->required();
    e->add_option("--alpha", eval.alpha, "Order alpha");
    e->add_option("--z", eval.z, "z parameter for daz: a positive number, 0 or inf");
    e->add_option("--rho", eval.rho, "Matrix JSON file")->required();
    e->add_option("--sigma", eval.sigma, "Matrix JSON file")->required();
    e->add_option("--seed", eval.seed, "Seed for measured kinds");
    e->add_option("--restarts", eval.restarts, "Random restarts for measured kinds");

    SweepArgs sweep;
    auto* s = app.add_subcommand("sweep", "Tabulate D_{alpha,z} over an alpha grid as CSV (alpha,z,value)");
    s->add_option("--rho", sweep.rho)->required();
    s->add_option("--sigma", sweep.sigma)->required();
    s->add_option("--alphas", sweep.alphas, "Comma-separated alpha grid");
    s->add_option("--z-mode", sweep.z_mode, "fixed|alpha|alpha-half|alpha-minus-1-over-kappa");
    s->add_option("--z", sweep.z, "z for --z-mode fixed");
    s->add_option("--kappa", sweep.kappa, "kappa for alpha-minus-1-over-kappa");
    s->add_option("--output", sweep.output, "Write CSV here instead of stdout");

    ChannelArgs channel;
    auto* c = app.add_subcommand("channel", "Channel divergences over an alpha grid, with channel D_max");
    c->add_option("--n1", channel.n1, "Channel JSON file")->required();
    c->add_option("--n2", channel.n2, "Channel JSON file")->required();
    c->add_flag("--choi", channel.choi, "Files hold bare Choi matrices (needs --d-in, --d-out)");
    c->add_option("--d-in", channel.d_in);
    c->add_option("--d-out", channel.d_out);
    c->add_option("--kind", channel.kind, "petz|sandwiched|umegaki|measured|dmax|daz");
    c->add_option("--alphas", channel.alphas, "Comma-separated alpha grid");
    c->add_option("--z", channel.z, "z for kind daz");
    c->add_option("--restarts", channel.restarts);
    c->add_option("--seed", channel.seed);

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "Run an invariant suite; exit 1 on any failure");
    v->add_option("--suite", verify.suite, "alt|variational|dmaxbound|nszkola|caratheodory|zlimits|families|channels|smoothing");
    v->add_option("--trials", verify.trials);
    v->add_option("--seed", verify.seed);
    v->add_option("--output", verify.output);
    v->add_flag("--timing", verify.timing, "Include wall times (output is then not reproducible)");

    FamilyArgs family;
    auto* f = app.add_subcommand("family", "Generate a state pair from a named family");
    f->add_option("--tag", family.tag, "a2|pure|kappa|appE|knife");
    f->add_option("--index", family.index, "n for a2/knife, eps otherwise");
    f->add_option("--gamma", family.spec.gamma);
    f->add_option("--c", family.spec.c);
    f->add_option("--d", family.spec.d);
    f->add_option("--beta", family.spec.beta);
    f->add_option("--kappa", family.spec.kappa);
    f->add_option("--lambda", family.spec.lambda);
    f->add_option("--dim", family.spec.dim);
    f->add_option("--out-rho", family.out_rho);
    f->add_option("--out-sigma", family.out_sigma);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kExitMalformed;
    }

    try {
        lab::ExperimentConfig config;
        if (!config_path.empty()) config.merge_json(read_text_file(config_path));
        if (*e) return run_eval(eval, config);
        if (*s) return run_sweep(sweep, config);
        if (*c) return run_channel(channel, config);
        if (*v) return run_verify(verify, config);
        if (*f) return run_family(family);
    } catch (const Error& err) {
        std::cerr << "qrd: " << err.what() << "\n";
        return exit_code_for(err.kind());
    }
    return 0;
}
