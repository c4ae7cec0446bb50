// harq-csi: reproduce the quantized-CSI HARQ throughput experiments as CSV.

#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "experiments.hpp"

namespace {

struct Overrides {
    std::string case_name, kind, snr_grid, out;
    int max_rounds = -1, f_levels = -1;
    long long mc = -1;
    unsigned long long seed = 0;
    bool seed_set = false;
};

void attach_overrides(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--case", ov.case_name, "experiment case (e.g. harq-new, outage-partial)");
    cmd->add_option("--kind", ov.kind, "protocol: alo | rtd | inr");
    cmd->add_option("--M", ov.max_rounds, "maximum transmissions per packet");
    cmd->add_option("--F", ov.f_levels, "feedback alphabet size");
    cmd->add_option("--snr-grid", ov.snr_grid, "dB grid, 'start:step:stop' or comma list");
    cmd->add_option("--mc", ov.mc, "Monte Carlo renewals per grid point (0 = analytic)");
    cmd->add_option("--seed", ov.seed, "simulation / search seed")
        ->each([&ov](const std::string&) { ov.seed_set = true; });
    cmd->add_option("--out", ov.out, "output CSV path");
}

void apply(const Overrides& ov, harq::cli::ExperimentConfig& cfg) {
    using harq::cli::apply_override;
    if (!ov.case_name.empty()) apply_override(cfg, "case", ov.case_name);
    if (!ov.kind.empty()) apply_override(cfg, "kind", ov.kind);
    if (ov.max_rounds >= 0) cfg.max_rounds = ov.max_rounds;
    if (ov.f_levels >= 0) cfg.f_levels = ov.f_levels;
    if (!ov.snr_grid.empty()) apply_override(cfg, "snr_db_grid", ov.snr_grid);
    if (ov.mc >= 0) cfg.mc_renewals = static_cast<std::uint64_t>(ov.mc);
    if (ov.seed_set) cfg.seed = ov.seed;
    if (!ov.out.empty()) cfg.output_path = ov.out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HARQ with quantized channel-state feedback: throughput experiments"};
    app.require_subcommand(1);

    std::string run_config, validate_config;
    Overrides ov;

    CLI::App* run_cmd = app.add_subcommand("run", "compute a case over an SNR grid, emit CSV");
    run_cmd->add_option("--config", run_config, "key=value experiment manifest")->required();
    attach_overrides(run_cmd, ov);

    CLI::App* val_cmd = app.add_subcommand("validate", "dry-run structural checks of a config");
    val_cmd->add_option("--config", validate_config, "key=value experiment manifest")
        ->required();
    attach_overrides(val_cmd, ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            harq::cli::ExperimentConfig cfg = harq::cli::load_config(run_config);
            apply(ov, cfg);
            return harq::cli::run(cfg);
        }
        harq::cli::ExperimentConfig cfg = harq::cli::load_config(validate_config);
        apply(ov, cfg);
        auto findings = harq::cli::validate(cfg);
        int worst = 0;
        for (const auto& f : findings) {
            const char* tag = f.severity == harq::cli::Severity::Invalid
                                  ? "error"
                                  : (f.severity == harq::cli::Severity::Unsupported
                                         ? "unsupported"
                                         : "note");
            std::printf("%s: %s\n", tag, f.message.c_str());
            if (f.severity == harq::cli::Severity::Invalid) worst = std::max(worst, 2);
            if (f.severity == harq::cli::Severity::Unsupported) worst = std::max(worst, 3);
        }
        if (findings.empty()) std::printf("ok: configuration is valid\n");
        return worst;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
