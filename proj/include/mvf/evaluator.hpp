#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mvf/combiner.hpp"
#include "mvf/core.hpp"
#include "mvf/fusion.hpp"
#include "mvf/inducer.hpp"

namespace mvf {

enum class EvalSubset { CompleteOnly, All };
const char* subset_key(EvalSubset s);

struct ClassAccuracy {
  int cls = 0;
  long support = 0;
  double accuracy = 0.0;
};

struct MacroResult {
  std::vector<ClassAccuracy> per_class;  // one entry per class, support >= 0
  double macro = 0.0;                    // mean over supported classes
  std::vector<int> zero_support;         // classes excluded from the mean
};

MacroResult macro_accuracy(const std::vector<int>& predictions,
                           const std::vector<int>& labels, int num_classes);

struct EvalReport {
  Task task = Task::LeftHandLocation;
  std::string method;
  std::string subset = "all";
  int fold = -1;
  MacroResult result;
  double complete_fraction = 0.0;
};

struct SingleViewSummary {
  std::vector<EvalReport> per_view;
  double best = 0.0, worst = 0.0, average = 0.0;
  int best_view = -1, worst_view = -1;
};

// Evaluates every view model on the (imputed) collections, blanks included.
SingleViewSummary eval_single_views(
    const std::vector<InducerModel>& models,
    const std::vector<const Collection*>& collections, Task task);

inline const std::vector<std::string> kEnsembleMethods = {
    "NaiveVoting", "WMV", "BMC", "WMV+BMC", "LateFusion"};

// One report per method. complete_only restricts to complete collections and
// throws std::runtime_error when none exist.
std::vector<EvalReport> eval_ensembles(
    const std::vector<InducerModel>& inducers, const FusionModel& fusion,
    const DiscountWeights& discounts,
    const std::vector<const Collection*>& collections, Task task,
    EvalSubset subset);

struct MethodStat {
  double mean = 0.0;
  double variance = 0.0;  // population variance across folds
};

struct CrossvalResult {
  // method -> fold macro accuracies, mean, variance. Methods: View0..N-1,
  // AverageOfN, BestOfN, WorstOfN, the ensemble methods.
  std::map<std::string, std::vector<double>> fold_macros;
  std::map<std::string, MethodStat> stats;
  std::vector<EvalReport> fold_reports;
};

// Leave-one-subject-out: k folds, each retraining all models with one subject
// held out entirely. Asserts subject disjointness per fold.
CrossvalResult loso_crossval(const Dataset& data, Task task, int k,
                             const TrainConfig& cfg,
                             const FusionArch& arch = FusionArch::desk());

// CSV rows: task,method,subset,fold,class,support,accuracy (plus a "macro"
// summary row per report with class = -1).
void write_reports_csv(const std::vector<EvalReport>& reports,
                       const std::string& path);

void write_summary_json(const std::vector<EvalReport>& reports,
                        const std::string& path);

// Minimal standalone bar chart of macro accuracies.
void write_macro_svg(const std::vector<EvalReport>& reports,
                     const std::string& path);

}  // namespace mvf
