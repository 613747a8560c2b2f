// Mean detection F1 per batch size, batch vs full-dataset method.

#include <cstdio>
#include <map>

#include "zloss/sweep.hpp"

int main() {
    using namespace zloss;
    for (Task task : {Task::regression, Task::classification}) {
        SweepConfig cfg;
        cfg.task = task;
        cfg.d = task == Task::regression ? 1 : 2;
        cfg.trials = 10;
        std::map<std::size_t, double> f1;
        double full = 0.0;
        for (const auto& row : run_sweep(cfg)) {
            if (row.report.method == DetectionMethod::full) full += row.report.f1 / cfg.trials;
            else f1[row.report.batch_size] += row.report.f1 / cfg.trials;
        }
        std::printf("%s, sigma %.1f\n", std::string(to_string(task)).c_str(), cfg.sigma);
        for (const auto& [bs, f] : f1) std::printf("  batch %4zu  f1 %.3f\n", bs, f);
        std::printf("  full        f1 %.3f\n", full);
    }
}
