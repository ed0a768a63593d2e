#include "padreg/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "padreg/dataset.hpp"
#include "padreg/flowviz.hpp"
#include "padreg/io.hpp"
#include "padreg/metrics.hpp"
#include "padreg/solver.hpp"
#include "padreg/warp.hpp"

namespace padreg {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDimension;
    } catch (const SolverError& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

SolverConfig solver_config_or_default(const fs::path& path) {
    return path.empty() ? SolverConfig{} : load_solver_config(path);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + path.string());
}

struct BenchJob {
    std::size_t pair_index;
    DeformationKind mode;
    DeltaForceVariant variant;
};

struct BenchRow {
    std::size_t pair_index = 0;
    DeformationKind mode{};
    DeltaForceVariant variant{};
    MetricReport report;
    double wall_ms = 0.0;
    std::string status = "ok";
};

BenchRow run_bench_job(const Dataset& ds, const BenchJob& job, const SolverConfig& base) {
    BenchRow row{job.pair_index, job.mode, job.variant, {}, 0.0, "ok"};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const FramePair& fp = ds.pairs[job.pair_index];
        const ScalarField moving = read_pgm_image(ds.frame_path(fp.moving_id));
        const ScalarField target = read_pgm_image(ds.frame_path(fp.target_id));
        SolverConfig cfg = base;
        cfg.model = DeformationModel::of(job.mode);
        cfg.df_variant = job.variant;
        const RegistrationResult res = register_pair(moving, target, ds.forces_of(fp), cfg);

        std::optional<VectorField> truth;
        if (fs::exists(ds.truth_field_path(job.pair_index))) truth = read_flo(ds.truth_field_path(job.pair_index));
        std::optional<LabelMask> mask_warped, mask_target;
        if (fs::exists(ds.mask_path(fp.moving_id)) && fs::exists(ds.mask_path(fp.target_id))) {
            mask_warped = warp_nearest(read_pgm_mask(ds.mask_path(fp.moving_id)), res.field);
            mask_target = read_pgm_mask(ds.mask_path(fp.target_id));
        }
        EvaluationInputs in;
        in.field = &res.field;
        in.truth = truth ? &*truth : nullptr;
        in.warped = &res.warped;
        in.target = &target;
        in.mask_warped = mask_warped ? &*mask_warped : nullptr;
        in.mask_target = mask_target ? &*mask_target : nullptr;
        in.df = res.df_value;
        row.report = evaluate(in);
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        row.status = "error: " + msg;
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

std::optional<double> median(std::vector<double> v) {
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    const double lo = v[n / 2 - 1], hi = v[n / 2];
    if (std::isinf(lo) || std::isinf(hi)) return hi;
    return 0.5 * (lo + hi);
}

// Metric columns shared by rows and the summary block.
std::vector<std::optional<double>> metric_values(const MetricReport& r) {
    return {r.dsc_artery, r.dsc_vein, r.hd95_artery, r.hd95_vein, r.ssim, r.mse, -r.mi, 100.0 * r.dr, r.epe};
}

const std::vector<std::string> kMetricColumns = {"dsc_artery", "dsc_vein", "hd95_artery", "hd95_vein", "ssim",
                                                 "mse",        "neg_mi",   "dr_percent",  "epe"};

std::string join(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
    }
    return s;
}

}  // namespace

const std::vector<std::string>& bench_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c = {"pair_id", "mode", "df_variant"};
        c.insert(c.end(), kMetricColumns.begin(), kMetricColumns.end());
        c.push_back("wall_ms");
        c.push_back("status");
        return c;
    }();
    return cols;
}

int effective_workers(int requested) {
    int n = std::max(1, requested);
    if (const char* cap = std::getenv("PADREG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(cap, &end, 10);
        if (end != cap && *end == '\0' && v >= 1) n = std::min<int>(n, static_cast<int>(v));
    }
    return n;
}

int cmd_phantom(const PhantomOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        PhantomDatasetConfig cfg;
        cfg.scene.inclusions = {{24.0, 20.0, 7.0, 0.3, kArteryLabel}, {36.0, 44.0, 8.0, 2.0, kVeinLabel}};
        cfg.scene.speckle = {SpeckleModel::Kind::Multiplicative, 0.4, 1.0};
        if (!opt.config.empty()) {
            std::ifstream in(opt.config);
            if (!in) throw IoError("cannot open dataset config " + opt.config.string());
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::parse_error& e) {
                throw IoError("cannot parse " + opt.config.string() + ": " + e.what());
            }
            cfg = phantom_dataset_config_from_json(j);
        }
        write_phantom_dataset(opt.out_dir, cfg, opt.n_pairs, opt.seed);
        out << "wrote " << opt.n_pairs << " pair(s) to " << opt.out_dir.string() << "\n";
        return kExitOk;
    });
}

int cmd_register(const RegisterOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        SolverConfig cfg = solver_config_or_default(opt.solver_config);
        if (opt.mode) cfg.model = DeformationModel::of(parse_deformation_kind(*opt.mode));
        if (opt.df_variant) cfg.df_variant = parse_delta_force_variant(*opt.df_variant);
        const ScalarField moving = read_pgm_image(opt.moving);
        const ScalarField target = read_pgm_image(opt.target);
        const ForcePair forces{opt.f_moving, opt.f_target};

        const RegistrationResult res = register_pair(moving, target, forces, cfg);
        write_flo(opt.out_field, res.field);
        write_stiffness_flo(opt.out_stiffness, res.stiffness);
        write_pgm_image(opt.out_warped, res.warped);
        if (!opt.moving_mask.empty()) {
            if (opt.out_warped_mask.empty()) throw IoError("--moving-mask needs --out-warped-mask");
            write_pgm_mask(opt.out_warped_mask, warp_nearest(read_pgm_mask(opt.moving_mask), res.field));
        }
        out << "L_sim=" << fmt(res.final.sim) << " L_reg=" << fmt(res.final.reg) << " total=" << fmt(res.final.total)
            << "\n";
        return kExitOk;
    });
}

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const VectorField field = read_flo(opt.field);
        const ScalarField warped = read_pgm_image(opt.warped);
        const ScalarField target = read_pgm_image(opt.target);
        std::optional<VectorField> truth;
        if (!opt.truth.empty()) truth = read_flo(opt.truth);
        std::optional<LabelMask> mw, mt;
        if (!opt.mask_warped.empty() || !opt.mask_target.empty()) {
            if (opt.mask_warped.empty() || opt.mask_target.empty())
                throw IoError("masks must be given as a pair (--mask-warped and --mask-target)");
            mw = read_pgm_mask(opt.mask_warped);
            mt = read_pgm_mask(opt.mask_target);
        }
        require_same_shape(field.dx, warped, "evaluate field/warped");
        require_same_shape(warped, target, "evaluate warped/target");
        if (truth) require_same_shape(field.dx, truth->dx, "evaluate field/truth");
        if (mw) {
            require_same_shape(*mw, target, "evaluate mask");
            require_same_shape(*mt, target, "evaluate mask");
        }
        EvaluationInputs in;
        in.field = &field;
        in.truth = truth ? &*truth : nullptr;
        in.warped = &warped;
        in.target = &target;
        in.mask_warped = mw ? &*mw : nullptr;
        in.mask_target = mt ? &*mt : nullptr;
        in.df = opt.df;
        const nlohmann::json j = to_json(evaluate(in));
        write_json(opt.out_json, j);
        out << j.dump() << "\n";
        return kExitOk;
    });
}

int cmd_viz(const VizOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        write_ppm(opt.out_ppm, flow_to_color(read_flo(opt.field), opt.max_mag));
        out << "wrote " << opt.out_ppm.string() << "\n";
        return kExitOk;
    });
}

int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Dataset ds = load_dataset(opt.dataset);
        const SolverConfig base = solver_config_or_default(opt.solver_config);
        std::vector<DeformationKind> modes;
        for (const auto& m : opt.modes) modes.push_back(parse_deformation_kind(m));
        std::vector<DeltaForceVariant> variants;
        for (const auto& v : opt.df_variants) variants.push_back(parse_delta_force_variant(v));

        std::vector<BenchJob> jobs;
        for (std::size_t p = 0; p < ds.pairs.size(); ++p)
            for (auto m : modes)
                for (auto v : variants) jobs.push_back({p, m, v});

        std::vector<BenchRow> rows(jobs.size());
        const int workers = std::min<int>(effective_workers(opt.workers), std::max<int>(1, int(jobs.size())));
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t i = next++; i < jobs.size(); i = next++) rows[i] = run_bench_job(ds, jobs[i], base);
        };
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
        for (auto& t : pool) t.join();

        std::string csv = join(bench_columns()) + "\n";
        for (const auto& r : rows) {
            std::vector<std::string> cells = {std::to_string(r.pair_index), std::string(to_string(r.mode)),
                                              std::string(to_string(r.variant))};
            for (const auto& v : metric_values(r.report)) cells.push_back(r.status == "ok" ? fmt(v) : "");
            cells.push_back(fmt(r.wall_ms));
            cells.push_back(r.status);
            csv += join(cells) + "\n";
        }

        csv += "\n# summary (medians over successful rows)\n";
        std::vector<std::string> head = {"mode", "df_variant", "n_ok"};
        head.insert(head.end(), kMetricColumns.begin(), kMetricColumns.end());
        csv += join(head) + "\n";
        if (!ds.pairs.empty()) {
            for (auto m : modes)
                for (auto v : variants) {
                    std::vector<std::vector<double>> cols(kMetricColumns.size());
                    int n_ok = 0;
                    for (const auto& r : rows) {
                        if (r.mode != m || r.variant != v || r.status != "ok") continue;
                        ++n_ok;
                        const auto vals = metric_values(r.report);
                        for (std::size_t c = 0; c < vals.size(); ++c)
                            if (vals[c]) cols[c].push_back(*vals[c]);
                    }
                    std::vector<std::string> cells = {std::string(to_string(m)), std::string(to_string(v)),
                                                      std::to_string(n_ok)};
                    for (auto& c : cols) cells.push_back(fmt(median(std::move(c))));
                    csv += join(cells) + "\n";
                }
        }

        std::ofstream f(opt.out_csv, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot create " + opt.out_csv.string());
        f << csv;
        if (!f) throw IoError("write failed for " + opt.out_csv.string());
        const auto failed = std::count_if(rows.begin(), rows.end(), [](const BenchRow& r) { return r.status != "ok"; });
        out << "bench: " << rows.size() << " run(s), " << failed << " failed, " << workers << " worker(s)\n";
        return kExitOk;
    });
}

}  // namespace padreg
