// Command-line front end: collect / control / sweep / verify / plot.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "deepc/csv.hpp"
#include "deepc/harness.hpp"
#include "deepc/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    return json::parse(f);
}

deepc::Vector vec_from(const json& j) {
    deepc::Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
    return v;
}

/// Per-channel reference replicated across `steps` window positions.
deepc::Vector replicate(const deepc::Vector& per_channel, int steps) {
    deepc::Vector v(per_channel.size() * steps);
    for (int t = 0; t < steps; ++t) v.segment(t * per_channel.size(), per_channel.size()) = per_channel;
    return v;
}

struct FullConfig {
    deepc::SystemModel sys = deepc::SystemModel::preset("double_integrator");
    deepc::NoiseSpec collect_noise, run_noise;
    deepc::InputGen input_gen;
    int T = 240, N = 1, T_ini = 2, T_f = 10;
    deepc::MatrixStructure structure = deepc::MatrixStructure::Page;
    deepc::CostSpec cost;
    deepc::ConstraintSpec constraints;
    deepc::AmbiguitySpec spec;
    deepc::LoopConfig loop;
};

std::vector<deepc::CostTerm> parse_terms(const json& arr, int channels, int steps) {
    std::vector<deepc::CostTerm> terms;
    for (const auto& t : arr) {
        double w = t.at("weight").get<double>();
        deepc::Vector ref = t.contains("ref") ? replicate(vec_from(t.at("ref")), steps)
                                              : deepc::Vector::Zero(channels * steps);
        std::string form = t.value("form", "norm2");
        terms.push_back(form == "sq_norm2" ? deepc::CostTerm::tracking_sq(w, ref)
                                           : deepc::CostTerm::tracking_norm2(w, ref));
    }
    return terms;
}

FullConfig parse_config(const json& j) {
    FullConfig c;
    if (j.contains("system")) {
        const auto& s = j.at("system");
        if (s.is_string())
            c.sys = deepc::SystemModel::preset(s.get<std::string>());
        else if (s.contains("preset"))
            c.sys = deepc::SystemModel::preset(s.at("preset").get<std::string>());
        else
            c.sys = deepc::SystemModel::from_json_text(s.dump());
    }
    if (j.contains("data")) {
        const auto& d = j.at("data");
        c.T = d.value("T", c.T);
        c.N = d.value("N", c.N);
        c.T_ini = d.value("T_ini", c.T_ini);
        c.T_f = d.value("T_f", c.T_f);
        if (d.contains("structure"))
            c.structure = deepc::structure_from_string(d.at("structure").get<std::string>());
        c.input_gen.seed = d.value("seed", 1);
        c.input_gen.scale = d.value("scale", 1.0);
        double cstd = d.value("noise_std", 0.0);
        if (cstd > 0.0)
            c.collect_noise = deepc::NoiseSpec::gaussian(cstd, c.sys.p, c.input_gen.seed + 17);
    }
    if (j.contains("cost")) {
        const auto& k = j.at("cost");
        if (k.contains("f1")) c.cost.f1 = parse_terms(k.at("f1"), c.sys.m, c.T_f);
        if (k.contains("f2")) c.cost.f2 = parse_terms(k.at("f2"), c.sys.p, c.T_f);
        if (k.contains("f3")) c.cost.f3 = parse_terms(k.at("f3"), c.sys.p, c.T_ini);
    }
    if (j.contains("constraints")) {
        const auto& k = j.at("constraints");
        if (k.contains("u_lower"))
            c.constraints.u_lower = replicate(vec_from(k.at("u_lower")), c.T_f);
        if (k.contains("u_upper"))
            c.constraints.u_upper = replicate(vec_from(k.at("u_upper")), c.T_f);
        if (k.contains("y_lower") && k.contains("y_upper"))
            c.constraints.output = deepc::OutputBox{replicate(vec_from(k.at("y_lower")), c.T_f),
                                                    replicate(vec_from(k.at("y_upper")), c.T_f)};
        c.constraints.alpha = k.value("alpha", c.constraints.alpha);
    }
    if (j.contains("ambiguity")) {
        const auto& k = j.at("ambiguity");
        c.spec.epsilon = k.value("epsilon", 0.0);
        c.spec.epsilon_con = k.value("epsilon_con", -1.0);
        c.spec.beta = k.value("beta", c.spec.beta);
        c.spec.alpha = c.constraints.alpha;
        std::string r = k.value("r", "2");
        c.spec.r = r == "1"   ? deepc::NormIndex::One
                   : r == "inf" ? deepc::NormIndex::Inf
                                : deepc::NormIndex::Two;
    }
    if (j.contains("loop")) {
        const auto& k = j.at("loop");
        c.loop.nu = k.value("nu", 1);
        c.loop.sim_steps = k.value("steps", 50);
        if (k.contains("y_ref")) c.loop.y_ref = vec_from(k.at("y_ref"));
        if (k.contains("u_ref")) c.loop.u_ref = vec_from(k.at("u_ref"));
        std::string ctrl = k.value("controller", "robust");
        c.loop.controller = ctrl == "deterministic" ? deepc::ControllerKind::Deterministic
                                                    : deepc::ControllerKind::Robust;
        std::string fail = k.value("on_failure", "reapply_shifted");
        c.loop.on_failure = fail == "abort" ? deepc::FailurePolicy::Abort
                                            : deepc::FailurePolicy::ReapplyShifted;
        double rstd = k.value("noise_std", 0.0);
        if (rstd > 0.0)
            c.run_noise = deepc::NoiseSpec::gaussian(rstd, c.sys.p, c.input_gen.seed + 23);
    }
    return c;
}

void cmd_collect(const std::string& config_path, const std::string& out_dir) {
    FullConfig c = parse_config(load_json(config_path));
    auto data = deepc::collect_data(c.sys, c.collect_noise, c.input_gen, c.T, c.N, c.T_ini, c.T_f,
                                    c.structure);
    fs::create_directories(out_dir);
    auto dump = [&](const std::string& name, const deepc::Matrix& m) {
        deepc::TrajectoryMatrix tm{m, c.structure, c.T_ini + c.T_f, 1};
        deepc::write_matrix_csv_file(out_dir + "/" + name + ".csv", tm);
    };
    dump("up", data.blocks.Up);
    dump("uf", data.blocks.Uf);
    for (int i = 0; i < c.N; ++i) {
        dump("yp_" + std::to_string(i + 1), data.blocks.Yp[i]);
        dump("yf_" + std::to_string(i + 1), data.blocks.Yf[i]);
    }
    deepc::Matrix xi(data.blocks.xi_sample(0).size(), c.N);
    for (int i = 0; i < c.N; ++i) xi.col(i) = data.blocks.xi_sample(i);
    std::ofstream xf(out_dir + "/xi.csv");
    deepc::write_distribution_csv(xf, deepc::EmpiricalDistribution::uniform(xi, c.spec.r));
    std::cout << "collected T=" << c.T << " N=" << c.N << " K=" << data.blocks.K
              << " structure=" << deepc::to_string(c.structure)
              << " exciting=" << (data.exciting ? "yes" : "no") << "\n";
}

void cmd_control(const std::string& config_path, const std::string& out_dir) {
    FullConfig c = parse_config(load_json(config_path));
    auto data = deepc::collect_data(c.sys, c.collect_noise, c.input_gen, c.T, c.N, c.T_ini, c.T_f,
                                    c.structure);
    auto log = deepc::run_receding_horizon(c.sys, c.run_noise, data.blocks, c.cost, c.constraints,
                                           c.spec, c.loop);
    fs::create_directories(out_dir);
    std::ofstream f(out_dir + "/runlog.csv");
    log.write_csv(f);
    std::cout << "steps=" << log.records.size() << " tracking_error=" << log.tracking_error
              << " failures=" << log.failures << (log.aborted ? " ABORTED" : "") << "\n";
}

void cmd_sweep(const std::string& config_path, const std::string& axis_name,
               const std::vector<double>& values, int trials, const std::string& out_dir) {
    FullConfig c = parse_config(load_json(config_path));
    deepc::SweepBase base;
    base.sys = c.sys;
    base.noise = c.run_noise;
    base.collect_noise = c.collect_noise;
    base.input_gen = c.input_gen;
    base.T = c.T;
    base.N = c.N;
    base.T_ini = c.T_ini;
    base.T_f = c.T_f;
    base.structure = c.structure;
    base.cost = c.cost;
    base.constraints = c.constraints;
    base.spec = c.spec;
    base.loop = c.loop;
    auto table = deepc::sweep(base, deepc::sweep_axis_from_string(axis_name), values, trials);
    fs::create_directories(out_dir);
    std::ofstream f(out_dir + "/sweep.csv");
    table.write_csv(f);
    std::cout << "sweep rows=" << table.rows.size() << " -> " << out_dir << "/sweep.csv\n";
}

int cmd_verify(const std::string& suite) {
    auto report = deepc::verify(deepc::verify_suite_from_string(suite));
    report.print(std::cout);
    return report.all_pass() ? 0 : 1;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> row;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        rows.push_back(std::move(row));
    }
    return rows;
}

void cmd_plot(const std::string& input, const std::string& output) {
    auto rows = read_csv_rows(input);
    if (rows.size() < 2) throw std::runtime_error("plot: no data rows in " + input);
    const auto& header = rows.front();
    std::vector<deepc::PlotSeries> series;
    bool is_runlog = header.front() == "t";
    if (is_runlog) {
        for (std::size_t c = 1; c < header.size(); ++c) {
            if (header[c] == "status" || header[c] == "objective" || header[c] == "solve_ms")
                continue;
            deepc::PlotSeries s;
            s.label = header[c];
            for (std::size_t r = 1; r < rows.size(); ++r) {
                s.x.push_back(std::stod(rows[r][0]));
                s.y.push_back(std::stod(rows[r][c]));
            }
            series.push_back(std::move(s));
        }
        deepc::write_svg_file(output, deepc::render_line_plot("closed-loop trajectories", "step",
                                                              "value", series));
    } else {
        // sweep table: mean tracking error per axis value
        std::map<double, std::pair<double, int>> agg;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r][2] == "nan") continue;
            auto& [sum, cnt] = agg[std::stod(rows[r][0])];
            sum += std::stod(rows[r][2]);
            cnt += 1;
        }
        deepc::PlotSeries s;
        s.label = "mean tracking error";
        for (const auto& [v, sc] : agg) {
            s.x.push_back(v);
            s.y.push_back(sc.first / sc.second);
        }
        bool log_x = header.front() == "epsilon";
        deepc::write_svg_file(output, deepc::render_line_plot("sweep: " + header.front(),
                                                              header.front(), "tracking error", {s},
                                                              720, 440, log_x));
    }
    std::cout << "wrote " << output << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"data-driven robust predictive control toolkit"};
    app.require_subcommand(1);

    std::string config, out_dir = ".", axis = "epsilon", suite = "lemma";
    std::string plot_in, plot_out = "plot.svg";
    std::vector<double> values;
    int trials = 1;

    auto* collect = app.add_subcommand("collect", "generate excitation data and write data matrices");
    collect->add_option("--config", config, "JSON config")->required();
    collect->add_option("--out", out_dir, "output directory");

    auto* control = app.add_subcommand("control", "run the receding-horizon loop, write runlog.csv");
    control->add_option("--config", config, "JSON config")->required();
    control->add_option("--out", out_dir, "output directory");

    auto* sweep_cmd = app.add_subcommand("sweep", "hyperparameter sweep, write sweep.csv");
    sweep_cmd->add_option("--config", config, "JSON config")->required();
    sweep_cmd->add_option("--axis", axis, "epsilon|columns|structure|t_ini|batches");
    sweep_cmd->add_option("--values", values, "axis grid")->required();
    sweep_cmd->add_option("--trials", trials, "trials per grid point");
    sweep_cmd->add_option("--out", out_dir, "output directory");

    auto* verify_cmd = app.add_subcommand("verify", "run a property suite");
    verify_cmd->add_option("--suite", suite, "lemma|reformulation|equivalence|concentration");

    auto* plot = app.add_subcommand("plot", "render runlog.csv or sweep.csv as SVG");
    plot->add_option("--input", plot_in, "CSV produced by control/sweep")->required();
    plot->add_option("--output", plot_out, "SVG path");

    CLI11_PARSE(app, argc, argv);
    try {
        if (collect->parsed()) cmd_collect(config, out_dir);
        if (control->parsed()) cmd_control(config, out_dir);
        if (sweep_cmd->parsed()) cmd_sweep(config, axis, values, trials, out_dir);
        if (verify_cmd->parsed()) return cmd_verify(suite);
        if (plot->parsed()) cmd_plot(plot_in, plot_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
