// Command-line front end: dataset generation/validation, kernel computation,
// spectral and alignment analysis, gradient-descent training with theoretical
// bound curves, and a merged JSON experiment report.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ntkspectra/alignment.hpp"
#include "ntkspectra/bounds.hpp"
#include "ntkspectra/csv.hpp"
#include "ntkspectra/dataio.hpp"
#include "ntkspectra/netsim.hpp"
#include "ntkspectra/ntk_analytic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nk = ntkspectra;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 2 usage, 3 numerical failure, 4 I/O.
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIO = 4;

struct GlobalOpts {
    std::string out_dir = ".";
    std::string format = "json";
    std::uint64_t seed = 0;
};

std::string out_path(const GlobalOpts& g, const std::string& name) {
    std::filesystem::create_directories(g.out_dir);
    return (std::filesystem::path(g.out_dir) / name).string();
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw nk::IOError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nk::MissingArtifactError("missing artifact: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw nk::ParseError(std::string("invalid JSON in ") + path + ": " + e.what(), 0, 0);
    }
    return j;
}

// "count@angle" or "count@lo:hi" (log-spaced angles between lo and hi).
std::vector<std::pair<long, double>> parse_pair_specs(const std::vector<std::string>& specs) {
    std::vector<std::pair<long, double>> out;
    for (const auto& s : specs) {
        const auto at = s.find('@');
        if (at == std::string::npos)
            throw nk::InvalidSpecError("--pairs expects count@angle or count@lo:hi, got '" + s + "'");
        const long count = std::stol(s.substr(0, at));
        const std::string rest = s.substr(at + 1);
        const auto colon = rest.find(':');
        if (colon == std::string::npos) {
            out.emplace_back(count, std::stod(rest));
        } else {
            const double lo = std::stod(rest.substr(0, colon));
            const double hi = std::stod(rest.substr(colon + 1));
            if (!(lo > 0.0 && hi > lo)) throw nk::InvalidSpecError("--pairs: need 0 < lo < hi");
            for (long k = 0; k < count; ++k) {
                const double f = (count == 1) ? 0.0
                                              : static_cast<double>(k) / static_cast<double>(count - 1);
                out.emplace_back(1, std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))));
            }
        }
    }
    return out;
}

void save_profile_csv(const std::string& path, const nk::AlignmentProfile& prof) {
    std::ofstream out(path);
    if (!out) throw nk::IOError("cannot open for writing: " + path);
    out << "rank,lambda,proj\n";
    for (const auto& p : prof.points)
        out << p.rank << ',' << nk::format_double(p.lambda) << ',' << nk::format_double(p.proj)
            << '\n';
}

json profile_summary(const nk::AlignmentProfile& prof, const nk::SpectralDecomposition* decomp,
                     const nk::Vector* band_target) {
    json j;
    j["alpha"] = prof.alpha;
    j["intercept"] = prof.log_intercept;
    j["r_squared"] = prof.r_squared;
    j["exclude_top_k"] = prof.excluded_top_k;
    j["floor"] = prof.floor;

    // Power-law fit over the retained rank range of the profile's lambdas.
    nk::Vector lambdas(static_cast<Eigen::Index>(prof.points.size()));
    for (std::size_t i = 0; i < prof.points.size(); ++i)
        lambdas(static_cast<Eigen::Index>(i)) = prof.points[i].lambda;
    long fit_end = 0;
    for (const auto& p : prof.points)
        if (p.lambda > prof.floor) fit_end = p.rank;
    try {
        const auto pl = nk::fit_power_law(lambdas, prof.excluded_top_k + 1, fit_end);
        j["q"] = pl.q;
        j["C1"] = pl.c1;
        j["C2"] = pl.c2;
    } catch (const std::exception& e) {
        j["q"] = nullptr;
        j["C1"] = nullptr;
        j["C2"] = nullptr;
        j["power_law_skipped"] = e.what();
    }

    if (decomp != nullptr && band_target != nullptr) {
        try {
            const auto band = nk::estimate_alignment_band(*decomp, *band_target, prof.floor,
                                                          prof.excluded_top_k);
            j["c"] = band.c;
            j["delta"] = band.delta;
            j["dominance"] = band.degenerate ? json(nullptr) : json(band.dominance);
        } catch (const std::exception& e) {
            j["c"] = nullptr;
            j["band_skipped"] = e.what();
        }
    }
    return j;
}

// Like make_profile, but degrades to an unfitted profile when too few points
// survive the filters (tiny datasets) instead of failing the whole command.
nk::AlignmentProfile profile_or_points(const nk::SpectralDecomposition& decomp,
                                       const nk::Vector& target, long exclude_top_k,
                                       double floor) {
    try {
        return nk::make_profile(decomp, target, exclude_top_k, floor);
    } catch (const nk::InsufficientPointsError&) {
        nk::AlignmentProfile prof;
        prof.excluded_top_k = exclude_top_k;
        prof.floor = floor;
        const auto projs = nk::eigen_projections(decomp, target);
        for (std::size_t i = 0; i < projs.size(); ++i)
            prof.points.push_back({static_cast<long>(i) + 1,
                                   decomp.eigenvalues(static_cast<Eigen::Index>(i)), projs[i]});
        prof.alpha = std::numeric_limits<double>::quiet_NaN();
        prof.log_intercept = prof.alpha;
        prof.r_squared = prof.alpha;
        return prof;
    }
}

struct KernelOpts {
    std::string kind = "analytic";  // analytic | empirical
    int depth = 3;
    long width = 1024;
    std::uint64_t seed = 0;
};

void add_kernel_opts(CLI::App* cmd, KernelOpts& k) {
    cmd->add_option("--kernel", k.kind, "Kernel kind")->check(CLI::IsMember({"analytic", "empirical"}));
    cmd->add_option("--depth", k.depth, "Hidden layers L");
    cmd->add_option("--width", k.width, "Network width m (empirical kernel)");
    cmd->add_option("--seed", k.seed, "Network init seed (empirical kernel)");
}

int run(int argc, char** argv) {
    CLI::App app{"NTK spectra: kernels, alignment, and convergence bounds"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--out-dir", g.out_dir, "Output directory");
    app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", g.seed, "Global seed default");

    // ---- gen-data ----
    auto* gen = app.add_subcommand("gen-data", "Generate a unit-sphere dataset");
    long gen_n = 0, gen_d = 0;
    std::uint64_t gen_seed = 0;
    double gen_freq = 3.0;
    std::vector<std::string> gen_pairs;
    std::string gen_name = "dataset";
    bool gen_linear = false, gen_align = false;
    gen->add_option("--n", gen_n, "Number of samples")->required();
    gen->add_option("--d", gen_d, "Input dimension")->required();
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--freq", gen_freq, "Label frequency k in cos(k w.x)");
    gen->add_option("--pairs", gen_pairs, "Near-duplicate pairs: count@angle or count@lo:hi");
    gen->add_flag("--linear-labels", gen_linear, "Labels y = w.x instead of cos(k w.x)");
    gen->add_flag("--align-pairs", gen_align,
                  "Rotate duplicates toward the label direction (deterministic label gaps)");
    gen->add_option("--name", gen_name, "Output file stem");

    // ---- check-data ----
    auto* chk = app.add_subcommand("check-data", "Verify dataset assumptions");
    std::string chk_data;
    bool chk_norm = false;
    double chk_thresh = 0.05;
    std::string chk_out;
    chk->add_option("--data", chk_data, "Dataset CSV")->required();
    chk->add_flag("--normalize", chk_norm, "Normalize rows to the unit sphere");
    chk->add_option("--near-dup-threshold", chk_thresh, "Near-duplicate angle threshold (rad)");
    chk->add_option("--out", chk_out, "Report file (default stdout)");

    // ---- ntk ----
    auto* ntk = app.add_subcommand("ntk", "Compute an NTK matrix");
    std::string ntk_data, ntk_out = "kernel.csv";
    KernelOpts ntk_k;
    ntk->add_option("--data", ntk_data, "Dataset CSV")->required();
    add_kernel_opts(ntk, ntk_k);
    ntk->add_option("--out", ntk_out, "Output matrix CSV");

    // ---- spectrum ----
    auto* spc = app.add_subcommand("spectrum", "Eigenspectrum and label/residual profiles");
    std::string spc_data, spc_out = "spectrum";
    KernelOpts spc_k;
    long spc_topk = 10;
    double spc_floor = 1e-14;
    spc->add_option("--data", spc_data, "Dataset CSV")->required();
    add_kernel_opts(spc, spc_k);
    spc->add_option("--exclude-top-k", spc_topk, "Top eigenpairs excluded from fits");
    spc->add_option("--floor", spc_floor, "Numerical floor for fits");
    spc->add_option("--out", spc_out, "Output file stem");

    // ---- align ----
    auto* aln = app.add_subcommand("align", "Batched alignment profile");
    std::string aln_data, aln_out = "align", aln_target = "labels";
    KernelOpts aln_k;
    long aln_bs = 100, aln_nb = 1, aln_topk = 10;
    double aln_floor = 1e-14;
    std::uint64_t aln_seed = 0;
    aln->add_option("--data", aln_data, "Dataset CSV")->required();
    add_kernel_opts(aln, aln_k);
    aln->add_option("--batch-size", aln_bs, "Samples per batch");
    aln->add_option("--num-batches", aln_nb, "Number of batches");
    aln->add_option("--batch-seed", aln_seed, "Batch sampling / per-batch net seed");
    aln->add_option("--target", aln_target, "Projection target")
        ->check(CLI::IsMember({"labels", "residual"}));
    aln->add_option("--exclude-top-k", aln_topk, "Top eigenpairs excluded from the fit");
    aln->add_option("--floor", aln_floor, "Numerical floor");
    aln->add_option("--out", aln_out, "Output file stem");

    // ---- train ----
    auto* trn = app.add_subcommand("train", "Gradient descent with bound curves");
    std::string trn_data, trn_out = "train";
    long trn_width = 2048, trn_steps = 200, trn_topk = 10;
    int trn_depth = 3;
    std::uint64_t trn_seed = 0;
    double trn_eta = 0.0, trn_eta_scale = 0.5, trn_slack_frac = 0.05, trn_floor = 1e-14;
    trn->add_option("--data", trn_data, "Dataset CSV")->required();
    trn->add_option("--width", trn_width, "Network width m");
    trn->add_option("--depth", trn_depth, "Hidden layers L");
    trn->add_option("--seed", trn_seed, "Network init seed");
    trn->add_option("--eta", trn_eta, "Step size (absolute; overrides --eta-scale)");
    trn->add_option("--eta-scale", trn_eta_scale, "Step size as a multiple of 1/lambda_max(K0)");
    trn->add_option("--steps", trn_steps, "GD steps");
    trn->add_option("--slack-frac", trn_slack_frac, "Band slack epsilon as a fraction of L0");
    trn->add_option("--exclude-top-k", trn_topk, "Top eigenpairs excluded from the band");
    trn->add_option("--floor", trn_floor, "Numerical floor");
    trn->add_option("--out", trn_out, "Output file stem");

    // ---- bounds ----
    auto* bnd = app.add_subcommand("bounds", "Bound curves from a spectrum file");
    std::string bnd_spec, bnd_out = "bounds.csv";
    double bnd_c = 1.0, bnd_delta = 0.0, bnd_eps = 0.0, bnd_eta = 0.1, bnd_l0 = 1.0;
    long bnd_tmax = 100;
    bnd->add_option("--spectrum", bnd_spec, "Eigenvalue CSV (single column)")->required();
    bnd->add_option("--c", bnd_c, "Alignment constant c");
    bnd->add_option("--delta", bnd_delta, "Alignment constant delta");
    bnd->add_option("--eps", bnd_eps, "Slack epsilon");
    bnd->add_option("--eta", bnd_eta, "Step size");
    bnd->add_option("--l0", bnd_l0, "Initial loss");
    bnd->add_option("--t-max", bnd_tmax, "Last step");
    bnd->add_option("--out", bnd_out, "Output CSV");

    // ---- two-point ----
    auto* twp = app.add_subcommand("two-point", "Closed-form two-point analysis");
    double twp_theta = 0.0, twp_y1 = 0.0, twp_y2 = 0.0, twp_ly = 1.0;
    int twp_depth = 1;
    std::string twp_out;
    twp->add_option("--theta", twp_theta, "Angle between the two inputs (rad)")->required();
    twp->add_option("--depth", twp_depth, "Hidden layers L");
    twp->add_option("--y1", twp_y1, "Label 1");
    twp->add_option("--y2", twp_y2, "Label 2");
    twp->add_option("--ly", twp_ly, "Lipschitz constant of the labels");
    twp->add_option("--out", twp_out, "Report file (default stdout)");

    // ---- report ----
    auto* rpt = app.add_subcommand("report", "Merge artifacts into an experiment report");
    std::string rpt_label, rpt_residual, rpt_train, rpt_out = "report.json";
    double rpt_eps = 0.01;
    rpt->add_option("--align-label-json", rpt_label, "Label-alignment summary JSON")->required();
    rpt->add_option("--align-residual-json", rpt_residual, "Residual-alignment summary JSON");
    rpt->add_option("--train-json", rpt_train, "Training report JSON")->required();
    rpt->add_option("--target-eps", rpt_eps, "Target loss for the time-complexity bound");
    rpt->add_option("--out", rpt_out, "Output report JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    auto load_data = [&](const std::string& path, bool normalize = false) {
        return nk::load_csv(path, normalize);
    };
    auto build_kernel = [&](const nk::Dataset& ds, const KernelOpts& k) {
        if (k.kind == "analytic")
            return nk::build_ntk_matrix(ds.x, {k.depth, true});
        const auto net = nk::init_network(ds.x.cols(), k.width, k.depth, k.seed);
        return nk::empirical_ntk(net, ds.x);
    };

    if (gen->parsed()) {
        nk::SyntheticSpec spec;
        spec.n = gen_n;
        spec.d = gen_d;
        spec.seed = gen->count("--seed") ? gen_seed : g.seed;
        spec.frequency = gen_freq;
        spec.near_dup_pairs = parse_pair_specs(gen_pairs);
        spec.linear_labels = gen_linear;
        spec.align_pairs = gen_align;
        const auto ds = nk::generate_sphere_dataset(spec);
        const auto csv = out_path(g, gen_name + ".csv");
        nk::save_dataset_csv(csv, ds);
        json j;
        j["n"] = spec.n;
        j["d"] = spec.d;
        j["seed"] = spec.seed;
        j["frequency"] = spec.frequency;
        j["linear_labels"] = spec.linear_labels;
        j["align_pairs"] = spec.align_pairs;
        j["near_dup_pairs"] = json::array();
        for (const auto& [count, angle] : spec.near_dup_pairs)
            j["near_dup_pairs"].push_back({{"count", count}, {"angle", angle}});
        j["csv"] = csv;
        write_json(out_path(g, gen_name + ".spec.json"), j);
        std::cout << csv << '\n';
    } else if (chk->parsed()) {
        const auto ds = load_data(chk_data, chk_norm);
        const auto rep = nk::check_assumptions(ds, chk_thresh);
        json j;
        j["unit_norm_violations"] = rep.unit_norm_violations;
        j["parallel_pairs"] = rep.parallel_pairs;
        j["near_duplicate_pairs"] = rep.near_duplicate_pairs;
        j["min_pairwise_angle"] = rep.min_pairwise_angle;
        j["lipschitz_estimate"] = rep.lipschitz_estimate;
        j["assumptions_ok"] = rep.unit_norm_violations.empty() && rep.parallel_pairs.empty();
        if (chk_out.empty())
            std::cout << j.dump(2) << '\n';
        else
            write_json(out_path(g, chk_out), j);
    } else if (ntk->parsed()) {
        const auto ds = load_data(ntk_data);
        const auto k = build_kernel(ds, ntk_k);
        nk::save_matrix_csv(out_path(g, ntk_out), k.mat());
        std::cout << out_path(g, ntk_out) << '\n';
    } else if (spc->parsed()) {
        const auto ds = load_data(spc_data);
        const auto k = build_kernel(ds, spc_k);
        const auto decomp = nk::eigh_symmetric(k);
        nk::save_vector_csv(out_path(g, spc_out + ".eigenvalues.csv"), decomp.eigenvalues);

        const auto label_prof = profile_or_points(decomp, ds.y, spc_topk, spc_floor);
        save_profile_csv(out_path(g, spc_out + ".label_profile.csv"), label_prof);
        json j;
        j["tool_version"] = kVersion;
        j["kernel"] = spc_k.kind;
        j["depth"] = spc_k.depth;
        j["n"] = ds.x.rows();
        j["lambda_min"] = decomp.lambda_min();
        j["lambda_max"] = decomp.lambda_max();
        j["trace"] = decomp.eigenvalues.sum();
        j["label"] = profile_summary(label_prof, nullptr, nullptr);
        if (spc_k.kind == "empirical") {
            const auto net = nk::init_network(ds.x.cols(), spc_k.width, spc_k.depth, spc_k.seed);
            const nk::Vector r0 = nk::forward(net, ds.x) - ds.y;
            const auto res_prof = profile_or_points(decomp, r0, spc_topk, spc_floor);
            save_profile_csv(out_path(g, spc_out + ".residual_profile.csv"), res_prof);
            j["residual"] = profile_summary(res_prof, &decomp, &r0);
            j["width"] = spc_k.width;
            j["net_seed"] = spc_k.seed;
        }
        write_json(out_path(g, spc_out + ".summary.json"), j);
        std::cout << out_path(g, spc_out + ".summary.json") << '\n';
    } else if (aln->parsed()) {
        const auto ds = load_data(aln_data);
        nk::KernelSource source;
        if (aln_k.kind == "analytic")
            source = nk::AnalyticNTKConfig{aln_k.depth, true};
        else
            source = nk::EmpiricalKernelSpec{aln_k.width, aln_k.depth};
        const auto target =
            (aln_target == "labels") ? nk::TargetKind::labels : nk::TargetKind::residual;
        const auto prof = nk::batched_alignment(ds.x, ds.y, source, aln_bs, aln_nb,
                                                aln->count("--batch-seed") ? aln_seed : g.seed,
                                                target, aln_topk, aln_floor);
        save_profile_csv(out_path(g, aln_out + ".profile.csv"), prof);
        json j;
        j["tool_version"] = kVersion;
        j["target"] = aln_target;
        j["kernel"] = aln_k.kind;
        j["depth"] = aln_k.depth;
        j["batch_size"] = aln_bs;
        j["num_batches"] = aln_nb;
        j["n"] = ds.x.rows();

        // Band constants from the averaged profile ratios.
        json summary = profile_summary(prof, nullptr, nullptr);
        {
            double lo = 0, hi = 0;
            bool first = true;
            for (const auto& p : prof.points) {
                if (p.rank <= prof.excluded_top_k || !(p.lambda > prof.floor)) continue;
                const double ratio = p.proj / p.lambda;
                if (first) {
                    lo = hi = ratio;
                    first = false;
                } else {
                    lo = std::min(lo, ratio);
                    hi = std::max(hi, ratio);
                }
            }
            if (!first) {
                summary["c"] = (hi + lo) / 2.0;
                summary["delta"] = (hi - lo) / 2.0;
            }
        }
        j["summary"] = summary;
        write_json(out_path(g, aln_out + ".summary.json"), j);
        std::cout << out_path(g, aln_out + ".summary.json") << '\n';
    } else if (trn->parsed()) {
        const auto ds = load_data(trn_data);
        const auto net = nk::init_network(ds.x.cols(), trn_width, trn_depth, trn_seed);
        const auto k0 = nk::empirical_ntk(net, ds.x);
        const auto decomp = nk::eigh_symmetric(k0);
        const nk::Vector r0 = nk::forward(net, ds.x) - ds.y;
        const double l0 = 0.5 * r0.squaredNorm();
        const double eta =
            (trn->count("--eta") && trn_eta > 0.0) ? trn_eta : trn_eta_scale / decomp.lambda_max();

        const auto band = nk::estimate_alignment_band(decomp, r0, trn_floor, trn_topk);

        nk::GDConfig gd;
        gd.eta = eta;
        gd.steps = trn_steps;
        gd.record_residuals = true;
        const auto trace = nk::train_gd(net, ds.x, ds.y, gd);

        nk::BoundParams params;
        params.eta = eta;
        params.c = band.c;
        params.delta = band.delta;
        params.slack_epsilon = trn_slack_frac * l0;
        params.l0 = l0;
        const auto curve = nk::convergence_band(nk::clamp_psd(decomp.eigenvalues), params, trn_steps);

        const auto merged = out_path(g, trn_out + ".curve.csv");
        {
            std::ofstream out(merged);
            if (!out) throw nk::IOError("cannot open for writing: " + merged);
            out << "step,measured_loss,lower,upper,corollary_upper,classical,deviation_norm\n";
            for (std::size_t t = 0; t < trace.losses.size(); ++t) {
                out << t << ',' << nk::format_double(trace.losses[t]) << ','
                    << nk::format_double(curve.lower[t]) << ',' << nk::format_double(curve.upper[t])
                    << ',' << nk::format_double(curve.corollary_upper[t]) << ','
                    << nk::format_double(curve.classical[t]) << ','
                    << nk::format_double(trace.deviation_norms[t]) << '\n';
            }
        }

        long in_band = 0;
        double max_dev_ratio = 0.0;
        const double r0_norm = r0.norm();
        for (std::size_t t = 0; t < trace.losses.size(); ++t) {
            if (trace.losses[t] >= curve.lower[t] && trace.losses[t] <= curve.upper[t]) ++in_band;
            max_dev_ratio = std::max(max_dev_ratio, trace.deviation_norms[t] / r0_norm);
        }

        json j;
        j["tool_version"] = kVersion;
        j["n"] = ds.x.rows();
        j["d"] = ds.x.cols();
        j["width"] = trn_width;
        j["depth"] = trn_depth;
        j["seed"] = trn_seed;
        j["eta"] = eta;
        j["steps"] = trn_steps;
        j["L0"] = l0;
        j["lambda_min"] = decomp.lambda_min();
        j["lambda_max"] = decomp.lambda_max();
        j["trace_K"] = decomp.eigenvalues.sum();
        j["c"] = band.c;
        j["delta"] = band.delta;
        j["dominance"] = band.degenerate ? json(nullptr) : json(band.dominance);
        j["slack_epsilon"] = params.slack_epsilon;
        j["in_band_fraction"] =
            static_cast<double>(in_band) / static_cast<double>(trace.losses.size());
        j["max_deviation_ratio"] = max_dev_ratio;
        j["diverged"] = trace.diverged;
        j["curve_csv"] = merged;
        write_json(out_path(g, trn_out + ".report.json"), j);
        std::cout << out_path(g, trn_out + ".report.json") << '\n';
        if (trace.diverged) {
            std::cerr << "training diverged; partial outputs written\n";
            return kExitNumerical;
        }
    } else if (bnd->parsed()) {
        const nk::Vector eigenvalues = nk::load_vector_csv(bnd_spec);
        nk::BoundParams params;
        params.eta = bnd_eta;
        params.c = bnd_c;
        params.delta = bnd_delta;
        params.slack_epsilon = bnd_eps;
        params.l0 = bnd_l0;
        const auto curve = nk::convergence_band(eigenvalues, params, bnd_tmax);
        std::ofstream out(out_path(g, bnd_out));
        if (!out) throw nk::IOError("cannot open for writing: " + out_path(g, bnd_out));
        out << "step,lower,upper,corollary_upper,classical\n";
        for (std::size_t t = 0; t < curve.steps.size(); ++t) {
            out << curve.steps[t] << ',' << nk::format_double(curve.lower[t]) << ','
                << nk::format_double(curve.upper[t]) << ','
                << nk::format_double(curve.corollary_upper[t]) << ','
                << nk::format_double(curve.classical[t]) << '\n';
        }
        std::cout << out_path(g, bnd_out) << '\n';
    } else if (twp->parsed()) {
        const auto rep = nk::two_point_analysis(twp_theta, {twp_depth, true}, twp_y1, twp_y2, twp_ly);
        json j;
        j["theta"] = rep.theta;
        j["depth"] = twp_depth;
        j["lambda_max"] = rep.lambda_max;
        j["lambda_min"] = rep.lambda_min;
        j["v_max"] = {rep.v_max(0), rep.v_max(1)};
        j["v_min"] = {rep.v_min(0), rep.v_min(1)};
        j["proj_max"] = rep.proj_max;
        j["proj_min"] = rep.proj_min;
        j["lipschitz_rhs"] = rep.lipschitz_rhs;
        j["lambda_min_over_theta"] = rep.lambda_min / rep.theta;
        j["asymptotic_slope"] = twp_depth / (2.0 * M_PI);
        if (twp_out.empty())
            std::cout << j.dump(2) << '\n';
        else
            write_json(out_path(g, twp_out), j);
    } else if (rpt->parsed()) {
        const json label = load_json(rpt_label);
        const json train = load_json(rpt_train);
        const json label_summary = label.value("summary", json::object());
        json j;
        j["tool_version"] = kVersion;
        j["alpha_label"] = label_summary.value("alpha", json());
        if (!rpt_residual.empty()) {
            const json residual_summary = load_json(rpt_residual).value("summary", json::object());
            j["alpha_residual"] = residual_summary.value("alpha", json());
            j["q"] = residual_summary.value("q", json());
            j["C1"] = residual_summary.value("C1", json());
            j["C2"] = residual_summary.value("C2", json());
        } else {
            j["alpha_residual"] = nullptr;
            j["alpha_residual_reason"] = "no residual alignment artifact supplied";
            j["q"] = label_summary.value("q", json());
            j["C1"] = label_summary.value("C1", json());
            j["C2"] = label_summary.value("C2", json());
        }
        for (const char* key : {"c", "delta", "dominance", "lambda_min", "lambda_max", "trace_K",
                                "L0", "eta", "seed", "in_band_fraction", "max_deviation_ratio"})
            j[key] = train.contains(key) ? train[key] : json();

        j["target_epsilon"] = rpt_eps;
        try {
            nk::TimeComplexityInputs in;
            in.q = j["q"].get<double>();
            in.c1 = j["C1"].get<double>();
            in.c2 = j["C2"].get<double>();
            in.c = train.value("c", json()).get<double>();
            in.delta = train.value("delta", json()).get<double>();
            in.target_epsilon = rpt_eps;
            in.eta = train.value("eta", json()).get<double>();
            in.n = train.value("n", json()).get<long>();
            in.l0 = train.value("L0", json()).get<double>();
            j["T_epsilon"] = nk::time_complexity(in);
        } catch (const std::exception& e) {
            j["T_epsilon"] = nullptr;
            j["T_epsilon_reason"] = e.what();
        }
        try {
            nk::BoundParams params;
            params.l0 = train.value("L0", json()).get<double>();
            j["width_diag_log10"] = nk::width_requirement_log10(
                train.value("n", json()).get<long>(), train.value("lambda_min", json()).get<double>(),
                rpt_eps, params, train.value("depth", json()).get<int>());
        } catch (const std::exception& e) {
            j["width_diag_log10"] = nullptr;
            j["width_diag_reason"] = e.what();
        }
        j["artifacts"] = {{"align_label", rpt_label},
                          {"align_residual", rpt_residual},
                          {"train", rpt_train}};
        write_json(out_path(g, rpt_out), j);
        std::cout << out_path(g, rpt_out) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("NTKSPECTRA_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) {
            Eigen::setNbThreads(n);
#ifdef _OPENMP
            omp_set_num_threads(n);
#endif
        }
    }
    try {
        return run(argc, argv);
    } catch (const nk::IOError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIO;
    } catch (const nk::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIO;
    } catch (const nk::MissingArtifactError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIO;
    } catch (const nk::ZeroVectorRowError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIO;
    } catch (const nk::InvalidSpecError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nk::InvalidSizeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
