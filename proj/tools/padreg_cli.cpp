// padreg: force-guided deformable registration of ultrasound image pairs.

#include <iostream>

#include <CLI11.hpp>

#include "padreg/commands.hpp"

int main(int argc, char** argv) {
    using namespace padreg;

    CLI::App app{"Force-guided deformable registration for ultrasound image pairs"};
    app.require_subcommand(1);

    PhantomOptions ph;
    auto* phantom = app.add_subcommand("phantom", "Generate a synthetic force-paired dataset with ground truth");
    phantom->add_option("--config", ph.config, "Dataset config JSON (scene, force range)")->check(CLI::ExistingFile);
    phantom->add_option("--out", ph.out_dir, "Output dataset directory")->required();
    phantom->add_option("--pairs", ph.n_pairs, "Number of image pairs")->check(CLI::NonNegativeNumber);
    phantom->add_option("--seed", ph.seed, "Random seed");

    RegisterOptions reg;
    auto* regc = app.add_subcommand("register", "Register a moving image to a target image");
    regc->add_option("--moving", reg.moving, "Moving image (PGM)")->required();
    regc->add_option("--target", reg.target, "Target image (PGM)")->required();
    regc->add_option("--f-moving", reg.f_moving, "Contact force of the moving frame [N]")->required();
    regc->add_option("--f-target", reg.f_target, "Contact force of the target frame [N]")->required();
    regc->add_option("--mode", reg.mode, "physics | direct | linear | quadratic");
    regc->add_option("--df-variant", reg.df_variant, "normalized | raw | ratio | signed_sqrt");
    regc->add_option("--solver-config", reg.solver_config, "Solver config JSON");
    regc->add_option("--out-field", reg.out_field, "Deformation field output (.flo)")->required();
    regc->add_option("--out-stiffness", reg.out_stiffness, "Stiffness map output (.flo)")->required();
    regc->add_option("--out-warped", reg.out_warped, "Warped moving image output (PGM)")->required();
    regc->add_option("--moving-mask", reg.moving_mask, "Label mask of the moving frame (PGM)");
    regc->add_option("--out-warped-mask", reg.out_warped_mask, "Warped label mask output (PGM)");

    EvaluateOptions ev;
    auto* evc = app.add_subcommand("evaluate", "Compute registration metrics");
    evc->add_option("--field", ev.field, "Estimated field (.flo)")->required();
    evc->add_option("--truth", ev.truth, "Ground-truth field (.flo)");
    evc->add_option("--warped", ev.warped, "Warped moving image (PGM)")->required();
    evc->add_option("--target", ev.target, "Target image (PGM)")->required();
    evc->add_option("--mask-warped", ev.mask_warped, "Warped moving mask (PGM)");
    evc->add_option("--mask-target", ev.mask_target, "Target mask (PGM)");
    evc->add_option("--df", ev.df, "Force differential used for the discrepancy rate")->required();
    evc->add_option("--out", ev.out_json, "Metric report output (JSON)")->required();

    VizOptions vz;
    auto* vzc = app.add_subcommand("viz", "Render a field with the flow colour wheel");
    vzc->add_option("--field", vz.field, "Field (.flo)")->required();
    vzc->add_option("--out", vz.out_ppm, "Output image (PPM)")->required();
    vzc->add_option("--max-mag", vz.max_mag, "Magnitude mapped to full saturation")->check(CLI::PositiveNumber);

    BenchOptions bn;
    auto* bnc = app.add_subcommand("bench", "Register and evaluate every pair of a dataset");
    bnc->add_option("--dataset", bn.dataset, "Dataset directory")->required();
    bnc->add_option("--modes", bn.modes, "Deformation models")->delimiter(',');
    bnc->add_option("--df-variants", bn.df_variants, "Force-difference variants")->delimiter(',');
    bnc->add_option("--solver-config", bn.solver_config, "Solver config JSON");
    bnc->add_option("--out", bn.out_csv, "Output CSV")->required();
    bnc->add_option("--workers", bn.workers, "Parallel workers (capped by PADREG_THREADS)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitIo;
    }

    if (*phantom) return cmd_phantom(ph, std::cout, std::cerr);
    if (*regc) return cmd_register(reg, std::cout, std::cerr);
    if (*evc) return cmd_evaluate(ev, std::cout, std::cerr);
    if (*vzc) return cmd_viz(vz, std::cout, std::cerr);
    if (*bnc) return cmd_bench(bn, std::cout, std::cerr);
    return kExitIo;
}
