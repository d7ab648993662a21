#include "mvf/bench.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "mvf/imputer.hpp"

namespace mvf {

BenchOptions BenchOptions::defaults(std::uint64_t seed) {
  BenchOptions o;
  o.seed = seed;
  o.gen.rng_seed = seed;
  o.train.rng_seed = seed;
  return o;
}

BenchResult run_bench(const BenchOptions& opts, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  GenConfig gen = opts.gen;
  gen.rng_seed = opts.seed;
  Dataset data = generate(gen);
  split_random(data, SplitFractions{}, opts.seed);
  if (opts.write_dataset_file)
    write_dataset(data, out_dir + "/dataset.jsonl");

  std::vector<const Collection*> val = data.tagged(Split::Val);
  std::vector<const Collection*> test = data.tagged(Split::Test);

  BenchResult result;
  result.dataset_complete_fraction = data.complete_fraction();
  std::vector<EvalReport> all_reports;

  for (Task task : kAllTasks) {
    int ti = static_cast<int>(task);
    TrainConfig cfg = opts.train;
    cfg.rng_seed = opts.seed * 7919ULL + static_cast<std::uint64_t>(ti);

    std::vector<InducerModel> inducers;
    for (int v = 0; v < data.num_views; ++v) {
      TrainConfig vcfg = cfg;
      vcfg.rng_seed = cfg.rng_seed * 31ULL + static_cast<std::uint64_t>(v);
      inducers.push_back(train_inducer(data, v, task, vcfg));
      if (opts.write_checkpoints)
        save_inducer(inducers.back(),
                     out_dir + "/inducer_" + task_key(task) + "_v" +
                         std::to_string(v) + ".json");
    }
    FusionModel fusion = train_fusion(data, task, cfg, opts.arch);
    if (opts.write_checkpoints)
      save_fusion(fusion, out_dir + "/fusion_" + std::string(task_key(task)) +
                              ".json");

    DiscountWeights discounts = fit_discounts(inducers, val, task);

    BenchTaskResult& tr = result.per_task[ti];
    tr.single_views = eval_single_views(inducers, test, task);
    for (const EvalReport& rep : tr.single_views.per_view)
      all_reports.push_back(rep);

    for (EvalSubset subset : {EvalSubset::All, EvalSubset::CompleteOnly}) {
      std::vector<EvalReport> reports =
          eval_ensembles(inducers, fusion, discounts, test, task, subset);
      for (EvalReport& rep : reports) {
        if (subset == EvalSubset::All)
          tr.macro_all[rep.method] = rep.result.macro;
        else
          tr.macro_complete_only[rep.method] = rep.result.macro;
        tr.complete_fraction = rep.complete_fraction;
        all_reports.push_back(std::move(rep));
      }
    }
  }

  write_reports_csv(all_reports, out_dir + "/reports.csv");
  write_summary_json(all_reports, out_dir + "/summary.json");
  write_macro_svg(all_reports, out_dir + "/macro.svg");

  nlohmann::json summary;
  summary["seed"] = opts.seed;
  summary["complete_fraction"] = result.dataset_complete_fraction;
  for (Task task : kAllTasks) {
    const BenchTaskResult& tr = result.per_task[static_cast<int>(task)];
    nlohmann::json jt;
    jt["single_view"] = {{"best", tr.single_views.best},
                         {"worst", tr.single_views.worst},
                         {"average", tr.single_views.average},
                         {"best_view", tr.single_views.best_view},
                         {"worst_view", tr.single_views.worst_view}};
    jt["all"] = tr.macro_all;
    jt["complete_only"] = tr.macro_complete_only;
    jt["test_complete_fraction"] = tr.complete_fraction;
    summary[task_key(task)] = jt;
  }
  std::ofstream out(out_dir + "/bench_summary.json");
  if (!out)
    throw std::runtime_error("cannot write bench summary in " + out_dir);
  out << summary.dump(2) << "\n";
  return result;
}

}  // namespace mvf
