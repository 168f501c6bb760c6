#include "trimer/cli.hpp"

#include "trimer/errors.hpp"
#include "trimer/moment_dynamics.hpp"
#include "trimer/spectrum.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <functional>
#include <iostream>
#include <optional>

namespace trimer::cli {

using nlohmann::ordered_json;

namespace {

void add_chain_flags(CLI::App* cmd, ChainParams& p) {
    cmd->add_option("--gamma", p.gamma, "loss rate of B (frequency unit)")->capture_default_str();
    cmd->add_option("--delta", p.delta, "detuning of B")->capture_default_str();
    cmd->add_option("--j", p.j, "nearest-neighbour coupling")->capture_default_str();
    cmd->add_option("--delta-a", p.delta_a, "detuning of A")->capture_default_str();
    cmd->add_option("--delta-c", p.delta_c, "detuning of C")->capture_default_str();
}

ordered_json params_json(const ChainParams& p) {
    return ordered_json{{"gamma", p.gamma},     {"delta", p.delta},     {"j", p.j},
                        {"delta_a", p.delta_a}, {"delta_c", p.delta_c}, {"omega_drive", p.omega_drive}};
}

ordered_json peaks_json(const std::vector<Peak>& peaks) {
    ordered_json arr = ordered_json::array();
    for (const Peak& pk : peaks) {
        ordered_json fwhm = std::isfinite(pk.fwhm) ? ordered_json(pk.fwhm) : ordered_json(nullptr);
        arr.push_back({{"position", pk.position}, {"height", pk.height}, {"fwhm", fwhm}});
    }
    return arr;
}

void emit(const std::string& output, const std::string& content) {
    if (output.empty() || output == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        write_atomic(output, content);
    }
}

std::string sidecar_path(const std::string& output, const std::string& explicit_path) {
    if (!explicit_path.empty()) return explicit_path;
    if (output.empty() || output == "-") return {};
    std::filesystem::path p(output);
    p.replace_extension(".json");
    return p.string();
}

// ---- eig -------------------------------------------------------------------

struct EigArgs {
    ChainParams params;
    std::string omega_grid;
    std::string output;
    std::string sidecar;
};

int cmd_eig(EigArgs& args) {
    args.params.validate();
    const GridSpec grid = parse_grid(args.omega_grid);
    const std::vector<double> omegas = grid.values();
    const SweepTrace sweep = sweep_eigenvalues(args.params, Knob::OmegaDrive, omegas);

    std::string csv = "omega,branch,re_lambda,im_lambda,stable\n";
    ordered_json defective = ordered_json::array();
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        for (int b = 0; b < 6; ++b) {
            const Complex lam = sweep.branches[static_cast<std::size_t>(b)][i];
            csv += format_double(omegas[i]) + ',' + std::to_string(b) + ',' + format_double(lam.real()) + ',' +
                   format_double(lam.imag()) + ',' + (sweep.stable[i] ? "true" : "false") + '\n';
        }
        const EigenSet set = eig(build_dyn_matrix(with_knob(args.params, Knob::OmegaDrive, omegas[i])));
        ordered_json clusters = ordered_json::array();
        for (const EigenCluster& c : set.clusters) {
            if (!c.defective()) continue;
            clusters.push_back({{"re", c.centroid.real()},
                                {"im", c.centroid.imag()},
                                {"order", c.order()},
                                {"geometric_multiplicity", c.geometric_multiplicity},
                                {"defect_measure", c.defect_measure}});
        }
        if (!clusters.empty()) defective.push_back({{"omega", omegas[i]}, {"clusters", clusters}});
    }
    emit(args.output, csv);

    const std::string side = sidecar_path(args.output, args.sidecar);
    if (!side.empty()) {
        ordered_json report{{"params", params_json(args.params)}, {"defective_points", defective}};
        if (args.params.paper_regime()) {
            const EpDriveStrengths ep = ep_drive_strengths(args.params);
            report["analytic"] = {{"ep1", ep.ep1},
                                  {"ep_minus", ep.ep_minus},
                                  {"ep_plus", ep.ep_plus},
                                  {"critical_drive", critical_drive(args.params)}};
        }
        write_atomic(side, report.dump(2) + "\n");
    }
    return kOk;
}

// ---- spectrum --------------------------------------------------------------

struct SpectrumArgs {
    ChainParams params;
    std::optional<double> omega_drive;
    std::string w_grid = "-3:3:2001";
    std::string method = "closed";
    std::string output;
    std::string sidecar;
};

int cmd_spectrum(SpectrumArgs& args) {
    ChainParams p = args.params;
    if (args.omega_drive) {
        p.omega_drive = *args.omega_drive;
    } else if (args.method == "ep") {
        p.omega_drive = std::abs(p.delta);
    } else {
        throw std::invalid_argument("--omega-drive is required unless --method ep");
    }
    p.validate();
    if (!p.paper_regime()) throw std::invalid_argument("spectrum needs --delta-a 0 --delta-c 0");
    if (!below_critical_drive(p)) {
        throw NoSteadyState("no steady state: Omega >= Omega_c = " + format_double(critical_drive(p)));
    }
    const std::vector<double> grid = parse_grid(args.w_grid).values();

    SpectrumTrace spec;
    if (args.method == "closed") {
        spec = spectrum_closed_form(p, grid);
    } else if (args.method == "fourier") {
        spec = spectrum_fourier(p, grid);
    } else if (args.method == "ep") {
        spec = spectrum_ep(p, grid);
    } else {
        throw std::invalid_argument("unknown --method " + args.method);
    }
    emit(args.output, spectrum_csv(spec.omega_grid, spec.values));

    const std::string side = sidecar_path(args.output, args.sidecar);
    if (!side.empty()) {
        ordered_json markers = ordered_json::array();
        if (p.j > 0.0) {
            markers.push_back(-std::sqrt(2.0) * p.j);
            markers.push_back(std::sqrt(2.0) * p.j);
        }
        ordered_json report{{"method", std::string(method_name(spec.method))},
                            {"params", params_json(p)},
                            {"critical_drive", critical_drive(p)},
                            {"peak_count", spec.peaks.size()},
                            {"peaks", peaks_json(spec.peaks)},
                            {"markers", markers}};
        write_atomic(side, report.dump(2) + "\n");
    }
    return kOk;
}

// ---- ep --------------------------------------------------------------------

struct EpArgs {
    ChainParams params;
    std::string knob = "omega";
    std::string range;
    double tol = 1e-4;
    int scan_points = 401;
    std::string output;
};

int cmd_ep(EpArgs& args) {
    args.params.validate();
    const Knob knob = parse_knob(args.knob);
    const auto [lo, hi] = parse_range(args.range);
    if (args.scan_points < 3) throw std::invalid_argument("--scan-points must be >= 3");
    EpSearchOptions opts;
    opts.scan_points = args.scan_points;
    const std::vector<EpRecord> eps = detect_ep(args.params, knob, lo, hi, args.tol, opts);

    ordered_json found = ordered_json::array();
    ordered_json values = ordered_json::array();
    for (const EpRecord& r : eps) {
        ordered_json clusters = ordered_json::array();
        for (const EpCluster& c : r.clusters) {
            clusters.push_back({{"re", c.eigenvalue.real()},
                                {"im", c.eigenvalue.imag()},
                                {"order", c.order},
                                {"overlap", c.overlap},
                                {"gap", c.gap}});
        }
        found.push_back({{"knob_value", r.knob_value}, {"clusters", clusters}});
        values.push_back(r.knob_value);
    }
    ordered_json report{{"knob", std::string(knob_name(knob))},
                        {"range", {lo, hi}},
                        {"params", params_json(args.params)},
                        {"knob_values", values},
                        {"eps", found}};
    if (knob == Knob::OmegaDrive && args.params.paper_regime()) {
        const EpDriveStrengths ep = ep_drive_strengths(args.params);
        report["analytic"] = {{"ep1", ep.ep1},
                              {"ep_minus", ep.ep_minus},
                              {"ep_plus", ep.ep_plus},
                              {"critical_drive", critical_drive(args.params)}};
    }
    emit(args.output, report.dump(2) + "\n");
    return kOk;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
    VerifyOptions opts;
    std::string oracle = "none";
    std::string cutoff = "6,8,6";
    std::string inject;
    std::string output;
};

int cmd_verify(VerifyArgs& args) {
    if (args.oracle == "fock") {
        args.opts.fock_oracle = true;
    } else if (args.oracle != "none") {
        throw std::invalid_argument("unknown --oracle " + args.oracle);
    }
    args.opts.cutoffs = parse_cutoffs(args.cutoff);
    if (args.inject == "omega-sign") {
        args.opts.flip_omega_sign = true;
    } else if (!args.inject.empty()) {
        throw std::invalid_argument("unknown --inject-fault " + args.inject);
    }
    args.opts.params.validate();

    const std::vector<CheckResult> checks = run_verification(args.opts);
    bool all = true;
    ordered_json arr = ordered_json::array();
    for (const CheckResult& c : checks) {
        all = all && c.passed;
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " error=" << format_double(c.error)
                  << " tol=" << format_double(c.tolerance);
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << '\n';
        arr.push_back({{"name", c.name},
                       {"error", c.error},
                       {"tolerance", c.tolerance},
                       {"passed", c.passed},
                       {"detail", c.detail}});
    }
    std::cout << (all ? "all checks passed" : "verification FAILED") << std::endl;
    if (!args.output.empty()) {
        ordered_json report{{"params", params_json(args.opts.params)},
                            {"seed", args.opts.seed},
                            {"fock_oracle", args.opts.fock_oracle},
                            {"checks", arr},
                            {"passed", all}};
        write_atomic(args.output, report.dump(2) + "\n");
    }
    return all ? kOk : kBreach;
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::string output;
    double threshold = PeakOptions{}.threshold_fraction;
};

int cmd_fit(FitArgs& args) {
    const SpectrumSamples samples = read_spectrum_csv(args.input);
    SpectrumTrace spec;
    spec.omega_grid = samples.omega;
    spec.values = samples.value;
    PeakOptions opts;
    opts.threshold_fraction = args.threshold;
    spec.peaks = find_peaks(spec, opts);
    const CouplingEstimate est = estimate_coupling(spec, opts);
    ordered_json report{{"j_hat", est.j_hat},
                        {"separation", est.separation},
                        {"peaks", peaks_json(spec.peaks)},
                        {"notes", est.notes}};
    emit(args.output, report.dump(2) + "\n");
    return kOk;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Driven dissipative three-oscillator chain: eigenvalues, exceptional points, spectra"};
    app.name("trimer");
    app.require_subcommand(1);
    std::function<int()> action;

    EigArgs eig_args;
    auto* eig_cmd = app.add_subcommand("eig", "sweep the drive and write the six eigenvalue branches as CSV");
    add_chain_flags(eig_cmd, eig_args.params);
    eig_cmd->add_option("--omega", eig_args.omega_grid, "drive grid min:max:points")->required();
    eig_cmd->add_option("-o,--output", eig_args.output, "CSV path (stdout if omitted)");
    eig_cmd->add_option("--sidecar", eig_args.sidecar, "JSON path for defective clusters (default: output with .json)");
    eig_cmd->callback([&] { action = [&] { return cmd_eig(eig_args); }; });

    SpectrumArgs spec_args;
    auto* spec_cmd = app.add_subcommand("spectrum", "optical spectrum of B as CSV plus a JSON peak sidecar");
    add_chain_flags(spec_cmd, spec_args.params);
    spec_cmd->add_option("--omega-drive", spec_args.omega_drive, "drive strength (defaults to |delta| for --method ep)");
    spec_cmd->add_option("--w", spec_args.w_grid, "frequency grid min:max:points")->capture_default_str();
    spec_cmd->add_option("--method", spec_args.method, "closed | fourier | ep")
        ->check(CLI::IsMember({"closed", "fourier", "ep"}))
        ->capture_default_str();
    spec_cmd->add_option("-o,--output", spec_args.output, "CSV path (stdout if omitted)");
    spec_cmd->add_option("--sidecar", spec_args.sidecar, "JSON path (default: output with .json)");
    spec_cmd->callback([&] { action = [&] { return cmd_spectrum(spec_args); }; });

    EpArgs ep_args;
    auto* ep_cmd = app.add_subcommand("ep", "locate exceptional points along one parameter");
    add_chain_flags(ep_cmd, ep_args.params);
    ep_cmd->add_option("--omega-drive", ep_args.params.omega_drive, "drive strength (when another knob is scanned)");
    ep_cmd->add_option("--knob", ep_args.knob, "omega | delta | j | gamma | delta_a | delta_c")->capture_default_str();
    ep_cmd->add_option("--range", ep_args.range, "knob range min:max")->required();
    ep_cmd->add_option("--tol", ep_args.tol, "acceptance on eigenvalue gap and 1 - overlap")->capture_default_str();
    ep_cmd->add_option("--scan-points", ep_args.scan_points, "coarse scan resolution")->capture_default_str();
    ep_cmd->add_option("-o,--output", ep_args.output, "JSON path (stdout if omitted)");
    ep_cmd->callback([&] { action = [&] { return cmd_ep(ep_args); }; });

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "cross-validate closed forms against numerics");
    add_chain_flags(verify_cmd, verify_args.opts.params);
    verify_cmd->add_option("--omega-drive", verify_args.opts.params.omega_drive, "drive strength")->capture_default_str();
    verify_cmd->add_option("--seed", verify_args.opts.seed, "seed of the random parameter sets")->capture_default_str();
    verify_cmd->add_option("--random-sets", verify_args.opts.random_sets, "number of random eigenvalue checks")
        ->capture_default_str();
    verify_cmd->add_option("--oracle", verify_args.oracle, "none | fock")->capture_default_str();
    verify_cmd->add_option("--cutoff", verify_args.cutoff, "Fock cutoffs n_a,n_b,n_c")->capture_default_str();
    verify_cmd->add_option("--inject-fault", verify_args.inject, "test mode: omega-sign");
    verify_cmd->add_option("-o,--output", verify_args.output, "JSON report path");
    verify_cmd->callback([&] { action = [&] { return cmd_verify(verify_args); }; });

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "estimate J from the doublet of a spectrum CSV");
    fit_cmd->add_option("--input", fit_args.input, "spectrum CSV (omega,s_value)")->required();
    fit_cmd->add_option("--threshold", fit_args.threshold, "peak threshold as a fraction of the maximum")
        ->capture_default_str();
    fit_cmd->add_option("-o,--output", fit_args.output, "JSON path (stdout if omitted)");
    fit_cmd->callback([&] { action = [&] { return cmd_fit(fit_args); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kBadFlags;
    }

    try {
        return action();
    } catch (const NoSteadyState& e) {
        std::cerr << "trimer: " << e.what() << '\n';
        return kNoSteadyState;
    } catch (const NotDoublet& e) {
        std::cerr << "trimer: " << e.what() << '\n';
        return kNotDoublet;
    } catch (const UndefinedCorrelation& e) {
        std::cerr << "trimer: " << e.what() << '\n';
        return kBadFlags;
    } catch (const OutsidePaperRegime& e) {
        std::cerr << "trimer: " << e.what() << '\n';
        return kBadFlags;
    } catch (const Error& e) {
        std::cerr << "trimer: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "trimer: " << e.what() << '\n';
        return kBadFlags;
    } catch (const std::exception& e) {
        std::cerr << "trimer: " << e.what() << '\n';
        return kSolverFailure;
    }
}

}  // namespace trimer::cli
