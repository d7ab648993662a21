#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "mvf/datagen.hpp"
#include "mvf/evaluator.hpp"
#include "mvf/fusion.hpp"
#include "mvf/inducer.hpp"

namespace mvf {

struct BenchOptions {
  std::uint64_t seed = 42;
  GenConfig gen = GenConfig::defaults();
  TrainConfig train;
  FusionArch arch = FusionArch::desk();
  bool write_dataset_file = true;
  bool write_checkpoints = true;

  static BenchOptions defaults(std::uint64_t seed = 42);
};

struct BenchTaskResult {
  SingleViewSummary single_views;
  std::map<std::string, double> macro_all;            // method -> macro
  std::map<std::string, double> macro_complete_only;  // method -> macro
  double complete_fraction = 0.0;
};

struct BenchResult {
  std::array<BenchTaskResult, kNumTasks> per_task;
  double dataset_complete_fraction = 0.0;
};

// Full pipeline: generate (seeded), split 80/10/10, train 4 inducers + 1
// fusion model per task, evaluate single views and all five ensemble methods
// on both subsets. Writes dataset, checkpoints, reports.csv, summary.json and
// bench_summary.json under out_dir; all outputs are byte-deterministic in
// (seed, options).
BenchResult run_bench(const BenchOptions& opts, const std::string& out_dir);

}  // namespace mvf
