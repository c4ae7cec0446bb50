#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "harq/dp.hpp"
#include "harq/ergodic.hpp"
#include "harq/optimize.hpp"
#include "harq/outage.hpp"
#include "harq/simulate.hpp"

namespace harq::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const std::set<std::string> kCaseNames = {
    "ergodic-no-csi", "ergodic-partial", "ergodic-full",  "outage-no-csi", "outage-partial",
    "outage-full",    "harq-classical",  "harq-new",      "dp-full-csi"};

ProtocolKind kind_of(const std::string& name) {
    if (name == "alo") return ProtocolKind::Alo;
    if (name == "rtd") return ProtocolKind::Rtd;
    if (name == "inr") return ProtocolKind::Inr;
    throw std::domain_error("unknown protocol kind: " + name);
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Row {
    double snr_db = 0.0;
    double eta_nats = 0.0;
    double ratio = 0.0;
    double p_out = kNaN;
    double mean_renewal = kNaN;
    double mean_power = kNaN;
    double mc_eta = kNaN;
    double mc_se = kNaN;
    bool converged = true;
};

Row compute_point(const ExperimentConfig& cfg, double snr_db) {
    const double p_avg = std::pow(10.0, snr_db / 10.0);
    Row row;
    row.snr_db = snr_db;
    double full = ergodic_full_csi(p_avg).eta;

    SearchSpec spec = default_search(16);
    spec.seed = cfg.seed;

    if (cfg.case_name == "ergodic-no-csi") {
        row.eta_nats = ergodic_no_csi(p_avg);
        row.p_out = 0.0;
        row.mean_renewal = 1.0;
        row.mean_power = p_avg;
    } else if (cfg.case_name == "ergodic-partial") {
        auto sol = ergodic_partial_csi(p_avg, cfg.f_levels, spec);
        row.eta_nats = sol.eta;
        row.p_out = 0.0;
        row.mean_renewal = 1.0;
        row.mean_power = sol.quantizer.average_power();
    } else if (cfg.case_name == "ergodic-full") {
        row.eta_nats = full;
        row.p_out = 0.0;
        row.mean_renewal = 1.0;
        row.mean_power = p_avg;
    } else if (cfg.case_name == "outage-no-csi") {
        auto sol = outage_no_csi(p_avg);
        row.eta_nats = sol.eta;
        row.p_out = -std::expm1(-sol.threshold);
        row.mean_renewal = 1.0;
        row.mean_power = p_avg;
    } else if (cfg.case_name == "outage-partial") {
        auto sol = outage_partial_csi(p_avg, cfg.f_levels, spec);
        row.eta_nats = sol.eta;
        row.p_out = sol.quantizer.outage_probability();
        row.mean_renewal = 1.0;
        row.mean_power = sol.quantizer.average_power();
    } else if (cfg.case_name == "outage-full") {
        auto sol = outage_full_csi(p_avg);
        row.eta_nats = sol.eta;
        row.p_out = -std::expm1(-sol.threshold);
        row.mean_renewal = 1.0;
        row.mean_power = p_avg;
    } else if (cfg.case_name == "harq-classical" || cfg.case_name == "harq-new") {
        ProtocolKind kind = kind_of(cfg.kind);
        OptimizedPlan opt =
            cfg.case_name == "harq-classical"
                ? optimize_classical_plan(kind, cfg.max_rounds, p_avg, spec)
                : optimize_plan(kind, cfg.max_rounds, cfg.f_levels, p_avg, spec);
        row.eta_nats = opt.report.eta;
        row.p_out = opt.report.p_out;
        row.mean_renewal = opt.report.mean_renewal;
        row.mean_power = opt.report.mean_power;
        if (cfg.mc_renewals > 0) {
            RenewalStats sim = simulate(kind, opt.plan, cfg.mc_renewals, cfg.seed);
            row.mc_eta = sim.eta();
            row.mc_se = sim.se_eta;
        }
    } else if (cfg.case_name == "dp-full-csi") {
        double rate = cfg.rate_bits > 0.0 ? cfg.rate_bits * std::log(2.0) : kNaN;
        if (std::isnan(rate)) {
            auto full_outage = outage_full_csi(p_avg);
            rate = full_outage.eta / std::exp(-full_outage.threshold);
        }
        auto dp = dp_full_csi_throughput(kind_of(cfg.kind), cfg.max_rounds, p_avg, rate,
                                         DpGrid{cfg.dp_state_levels, cfg.dp_fading_levels});
        row.eta_nats = dp.eta;
        row.mean_power = dp.mean_power;
        row.converged = dp.converged;
    } else {
        throw std::domain_error("unknown case: " + cfg.case_name);
    }
    row.ratio = row.eta_nats / full;
    return row;
}

}  // namespace

std::vector<double> parse_snr_grid(const std::string& text) {
    std::vector<double> grid;
    std::string body = trim(text);
    if (body.empty()) return grid;
    if (body.find(':') != std::string::npos) {
        double start = 0.0, step = 0.0, stop = 0.0;
        char c1 = 0, c2 = 0;
        std::istringstream in(body);
        if (!(in >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' ||
            !(step > 0.0)) {
            throw std::domain_error("snr grid must be 'start:step:stop' or a comma list");
        }
        for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
        return grid;
    }
    std::istringstream in(body);
    std::string item;
    while (std::getline(in, item, ',')) {
        grid.push_back(std::stod(trim(item)));
    }
    return grid;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = trim(line.substr(0, line.find('#')));
        if (body.empty()) continue;
        auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw std::domain_error(path + ":" + std::to_string(line_no) +
                                    ": expected key=value");
        }
        apply_override(cfg, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "case") {
        cfg.case_name = value;
    } else if (key == "kind") {
        cfg.kind = value;
    } else if (key == "M") {
        cfg.max_rounds = std::stoi(value);
    } else if (key == "F") {
        cfg.f_levels = std::stoi(value);
    } else if (key == "snr_db_grid") {
        cfg.snr_grid_db = parse_snr_grid(value);
    } else if (key == "seed") {
        cfg.seed = std::stoull(value);
    } else if (key == "mc_renewals") {
        cfg.mc_renewals = std::stoull(value);
    } else if (key == "output_path") {
        cfg.output_path = value;
    } else if (key == "rate_bits") {
        cfg.rate_bits = std::stod(value);
    } else if (key == "dp_state_levels") {
        cfg.dp_state_levels = std::stoi(value);
    } else if (key == "dp_fading_levels") {
        cfg.dp_fading_levels = std::stoi(value);
    } else {
        throw std::domain_error("unknown config key: " + key);
    }
}

std::vector<Finding> validate(const ExperimentConfig& cfg) {
    std::vector<Finding> findings;
    auto invalid = [&](const std::string& m) { findings.push_back({Severity::Invalid, m}); };
    auto unsupported = [&](const std::string& m) {
        findings.push_back({Severity::Unsupported, m});
    };
    auto note = [&](const std::string& m) { findings.push_back({Severity::Note, m}); };

    if (!kCaseNames.count(cfg.case_name)) {
        invalid("unknown case '" + cfg.case_name + "'");
        return findings;
    }
    if (cfg.kind != "alo" && cfg.kind != "rtd" && cfg.kind != "inr") {
        invalid("kind must be one of alo|rtd|inr");
    }
    if (cfg.snr_grid_db.empty()) invalid("snr_db_grid is empty");
    if (cfg.max_rounds < 1) invalid("M must be >= 1");
    if (cfg.f_levels < 1) invalid("F must be >= 1");

    const bool harq_case = cfg.case_name == "harq-classical" || cfg.case_name == "harq-new";
    if (harq_case && cfg.max_rounds >= 2 && cfg.f_levels < 2) {
        invalid("M >= 2 with F = 1 is impossible: at least 1 bit is needed for ack/nack");
    }
    if (cfg.case_name == "harq-classical" && cfg.f_levels != 2) {
        invalid("harq-classical uses the single ack/nack bit; set F = 2");
    }
    if ((cfg.case_name == "ergodic-partial" || cfg.case_name == "outage-partial") &&
        cfg.f_levels < 2) {
        invalid(cfg.case_name + " needs F >= 2 (F = 1 is the no-CSI case)");
    }
    if (cfg.case_name == "harq-new" && cfg.kind == "inr" && cfg.max_rounds > 3 &&
        cfg.mc_renewals == 0) {
        unsupported("analytic INR tables stop at M = 3; pass --mc <n> for larger M");
    }
    if (harq_case && cfg.max_rounds > 3 && cfg.kind == "rtd" && cfg.mc_renewals == 0 &&
        cfg.case_name == "harq-new") {
        unsupported("analytic RTD tables stop at M = 3; pass --mc <n> for larger M");
    }
    if (cfg.case_name == "dp-full-csi") {
        if (cfg.max_rounds > 3) invalid("dp-full-csi supports M <= 3");
        if (cfg.dp_state_levels > 512 || cfg.dp_fading_levels > 512) {
            invalid("dp grids are capped at 512 levels");
        }
    }
    if (cfg.max_rounds == 1 && harq_case) {
        note("with M = 1 every protocol has the same throughput (the outage capacity)");
    }
    return findings;
}

int run(const ExperimentConfig& cfg) {
    auto start_time = std::chrono::steady_clock::now();
    auto findings = validate(cfg);
    bool invalid = false, unsupported = false;
    for (const auto& f : findings) {
        if (f.severity == Severity::Invalid) invalid = true;
        if (f.severity == Severity::Unsupported) unsupported = true;
        std::fprintf(stderr, "%s: %s\n",
                     f.severity == Severity::Invalid
                         ? "error"
                         : (f.severity == Severity::Unsupported ? "unsupported" : "note"),
                     f.message.c_str());
    }
    if (invalid) return 2;
    if (unsupported) return 3;

    std::vector<Row> rows(cfg.snr_grid_db.size());
    bool failed_numerics = false;
    std::string failure;
    {
        std::vector<std::future<Row>> futs;
        futs.reserve(cfg.snr_grid_db.size());
        for (double snr : cfg.snr_grid_db) {
            futs.push_back(std::async(std::launch::async,
                                      [&cfg, snr] { return compute_point(cfg, snr); }));
        }
        for (std::size_t i = 0; i < futs.size(); ++i) {
            try {
                rows[i] = futs[i].get();
                if (!rows[i].converged) {
                    failed_numerics = true;
                    failure = "dp refinement check flagged a too-coarse grid";
                }
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error at %g dB: %s\n", cfg.snr_grid_db[i], e.what());
                std::string what = e.what();
                return what.find("unsupported") != std::string::npos ||
                               what.find("Monte Carlo") != std::string::npos
                           ? 3
                           : 4;
            }
        }
    }

    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "error: cannot write %s\n", cfg.output_path.c_str());
        return 2;
    }
    out << "snr_db,eta_bits,eta_nats,ratio_full_csi,p_out,mean_renewal,mean_power,mc_eta,mc_se\n";
    for (const Row& r : rows) {
        out << fmt(r.snr_db) << ',' << fmt(r.eta_nats / std::log(2.0)) << ',' << fmt(r.eta_nats)
            << ',' << fmt(r.ratio) << ',' << fmt(r.p_out) << ',' << fmt(r.mean_renewal) << ','
            << fmt(r.mean_power) << ',' << fmt(r.mc_eta) << ',' << fmt(r.mc_se) << '\n';
    }
    out.close();

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
                      .count();
    std::ofstream meta(cfg.output_path + ".meta", std::ios::binary);
    meta << "tool=harq-csi\n"
         << "version=0.1.0\n"
         << "case=" << cfg.case_name << "\n"
         << "kind=" << cfg.kind << "\n"
         << "M=" << cfg.max_rounds << "\n"
         << "F=" << cfg.f_levels << "\n"
         << "seed=" << cfg.seed << "\n"
         << "mc_renewals=" << cfg.mc_renewals << "\n"
         << "grid_points=" << cfg.snr_grid_db.size() << "\n"
         << "wall_time_s=" << fmt(wall) << "\n";
    if (failed_numerics) {
        std::fprintf(stderr, "error: %s\n", failure.c_str());
        return 4;
    }
    return 0;
}

}  // namespace harq::cli
