#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deepc/mpc.hpp"
#include "deepc/plant.hpp"
#include "deepc/robustctl.hpp"

namespace deepc {

/// Random excitation input: i.i.d. Gaussian entries, scale per channel.
struct InputGen {
    std::uint64_t seed = 1;
    double scale = 1.0;
};

struct CollectResult {
    DataBlocks blocks;
    Signal u;                 // the shared excitation input
    std::vector<Signal> ys;   // N noisy output records
    bool exciting = false;    // structure-appropriate excitation verdict
};

/// Offline data collection: one excitation input reused across N batches, all
/// starting from the same (zero) initial state, each batch with an independent
/// noise stream. An optional state-feedback gain u = -K_fb x + excitation keeps
/// unstable plants bounded during collection.
CollectResult collect_data(const SystemModel& sys, const NoiseSpec& noise, const InputGen& input_gen,
                           int T, int N, int T_ini, int T_f, MatrixStructure structure,
                           const std::optional<Matrix>& stabilizer = std::nullopt);

enum class Bootstrap { HoverInput, RecordedTail };
enum class FailurePolicy { ReapplyShifted, Abort };
enum class ControllerKind { Deterministic, Robust };

struct LoopConfig {
    int nu = 1;         // inputs applied per solve
    int sim_steps = 50; // controlled steps after the bootstrap window
    Vector y_ref;       // per-channel reference (length p)
    Vector u_ref;       // hover input (length m)
    Bootstrap bootstrap = Bootstrap::HoverInput;
    FailurePolicy on_failure = FailurePolicy::ReapplyShifted;
    ControllerKind controller = ControllerKind::Robust;
    Vector x0;          // plant initial state; empty means zero
    std::optional<Signal> tail_u, tail_y;  // RecordedTail bootstrap window
};

struct RunRecord {
    int t;
    Vector u, y;
    double objective;
    std::string status;
    double solve_ms;
};

struct RunLog {
    std::vector<RunRecord> records;
    std::vector<double> solve_times;  // ms, one entry per solve attempt
    double tracking_error = 0.0;      // sum of ||y_t - y_ref||_2^2 over records
    int failures = 0;
    bool aborted = false;

    void write_csv(std::ostream& os) const;
};

/// Receding-horizon execution: at each period solve from the T_ini most recent
/// applied inputs / measured outputs, apply the first nu planned inputs to the
/// true plant, shift the window.
RunLog run_receding_horizon(const SystemModel& sys_true, const NoiseSpec& noise,
                            const DataBlocks& blocks, const CostSpec& cost,
                            const ConstraintSpec& constraints, const AmbiguitySpec& spec,
                            const LoopConfig& loop,
                            const SolveSettings& settings = SolveSettings{});

enum class SweepAxis { Epsilon, Columns, Structure, Tini, Batches };

SweepAxis sweep_axis_from_string(const std::string& s);
const char* to_string(SweepAxis a);

/// Everything needed to rebuild data and run one closed loop.
struct SweepBase {
    SystemModel sys;
    NoiseSpec noise;         // measurement noise during the run
    NoiseSpec collect_noise; // noise during data collection
    InputGen input_gen;
    int T = 200, N = 1, T_ini = 2, T_f = 10;
    MatrixStructure structure = MatrixStructure::Page;
    CostSpec cost;
    ConstraintSpec constraints;
    AmbiguitySpec spec;
    LoopConfig loop;
    SolveSettings settings;
};

struct SweepRow {
    double axis_value;  // numeric encoding (Structure: 0 = Page, 1 = Hankel)
    int trial;
    double tracking_error;
    double mean_solve_ms;
    int failures;
    bool ok;
};

struct SweepTable {
    SweepAxis axis;
    std::vector<SweepRow> rows;

    void write_csv(std::ostream& os) const;
};

/// Grid of closed-loop runs, one row per (axis value, trial). Within a trial
/// the same collected data is reused across all axis values; trials run as
/// independent tasks. Deterministic for fixed config and seeds.
SweepTable sweep(const SweepBase& base, SweepAxis axis, const std::vector<double>& values,
                 int trials);

enum class VerifySuite { Lemma, Reformulation, Equivalence, Concentration };

VerifySuite verify_suite_from_string(const std::string& s);

struct VerifyLine {
    std::string name;
    bool pass;
    double measured;  // the tolerance-relevant quantity
};

struct VerifyReport {
    std::vector<VerifyLine> lines;
    bool all_pass() const;
    void print(std::ostream& os) const;
};

VerifyReport verify(VerifySuite suite);

}  // namespace deepc
