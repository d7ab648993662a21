#include "mvf/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "mvf/datagen.hpp"

namespace mvf {

const char* subset_key(EvalSubset s) {
  return s == EvalSubset::CompleteOnly ? "complete_only" : "all";
}

MacroResult macro_accuracy(const std::vector<int>& predictions,
                           const std::vector<int>& labels, int num_classes) {
  if (predictions.empty() || predictions.size() != labels.size())
    throw std::invalid_argument("macro_accuracy: bad input lengths");
  std::vector<long> support(num_classes, 0), correct(num_classes, 0);
  for (size_t i = 0; i < labels.size(); ++i) {
    int y = labels[i];
    if (y < 0 || y >= num_classes)
      throw std::invalid_argument("macro_accuracy: label out of range");
    ++support[y];
    if (predictions[i] == y) ++correct[y];
  }
  MacroResult out;
  double sum = 0.0;
  int supported = 0;
  for (int c = 0; c < num_classes; ++c) {
    ClassAccuracy ca;
    ca.cls = c;
    ca.support = support[c];
    if (support[c] > 0) {
      ca.accuracy = static_cast<double>(correct[c]) / support[c];
      sum += ca.accuracy;
      ++supported;
    } else {
      out.zero_support.push_back(c);
    }
    out.per_class.push_back(ca);
  }
  out.macro = supported > 0 ? sum / supported : 0.0;
  return out;
}

SingleViewSummary eval_single_views(
    const std::vector<InducerModel>& models,
    const std::vector<const Collection*>& collections, Task task) {
  if (collections.empty())
    throw std::invalid_argument("eval_single_views: empty test set");
  SingleViewSummary out;
  int m = task_spec(task).num_classes();
  double cf = 0.0;
  for (const Collection* c : collections) cf += complete(*c) ? 1.0 : 0.0;
  cf /= static_cast<double>(collections.size());

  for (size_t v = 0; v < models.size(); ++v) {
    std::vector<int> preds, labels;
    preds.reserve(collections.size());
    for (const Collection* c : collections) {
      preds.push_back(argmax_class(models[v].predict(*c)));
      labels.push_back(c->label(task));
    }
    EvalReport rep;
    rep.task = task;
    rep.method = "View" + std::to_string(v);
    rep.result = macro_accuracy(preds, labels, m);
    rep.complete_fraction = cf;
    out.per_view.push_back(std::move(rep));
  }
  out.best_view = 0;
  out.worst_view = 0;
  double sum = 0.0;
  for (size_t v = 0; v < out.per_view.size(); ++v) {
    double a = out.per_view[v].result.macro;
    sum += a;
    if (a > out.per_view[out.best_view].result.macro)
      out.best_view = static_cast<int>(v);
    if (a < out.per_view[out.worst_view].result.macro)
      out.worst_view = static_cast<int>(v);
  }
  out.best = out.per_view[out.best_view].result.macro;
  out.worst = out.per_view[out.worst_view].result.macro;
  out.average = sum / static_cast<double>(out.per_view.size());
  return out;
}

std::vector<EvalReport> eval_ensembles(
    const std::vector<InducerModel>& inducers, const FusionModel& fusion,
    const DiscountWeights& discounts,
    const std::vector<const Collection*>& collections, Task task,
    EvalSubset subset) {
  if (collections.empty())
    throw std::invalid_argument("eval_ensembles: empty test set");
  double cf = 0.0;
  for (const Collection* c : collections) cf += complete(*c) ? 1.0 : 0.0;
  cf /= static_cast<double>(collections.size());

  std::vector<const Collection*> subset_cols;
  if (subset == EvalSubset::CompleteOnly) {
    for (const Collection* c : collections)
      if (complete(*c)) subset_cols.push_back(c);
    if (subset_cols.empty())
      throw std::runtime_error(
          "eval_ensembles: no complete collections in subset");
  } else {
    subset_cols = collections;
  }

  int m = task_spec(task).num_classes();
  std::vector<int> labels;
  std::vector<std::vector<int>> preds(kEnsembleMethods.size());
  for (const Collection* c : subset_cols) {
    labels.push_back(c->label(task));
    std::vector<ProbVector> probs;
    probs.reserve(inducers.size());
    for (const InducerModel& model : inducers)
      probs.push_back(model.predict(*c));
    AvailabilityWeights aw = bmc_weights(availability_mask(*c));
    preds[0].push_back(naive_vote(probs).cls);
    preds[1].push_back(wmv(probs, discounts).cls);
    preds[2].push_back(bmc(probs, aw).cls);
    preds[3].push_back(wmv_bmc(probs, discounts, aw).cls);
    preds[4].push_back(argmax_class(fusion.forward(*c)));
  }

  std::vector<EvalReport> out;
  for (size_t i = 0; i < kEnsembleMethods.size(); ++i) {
    EvalReport rep;
    rep.task = task;
    rep.method = kEnsembleMethods[i];
    rep.subset = subset_key(subset);
    rep.result = macro_accuracy(preds[i], labels, m);
    rep.complete_fraction = cf;
    out.push_back(std::move(rep));
  }
  return out;
}

CrossvalResult loso_crossval(const Dataset& data, Task task, int k,
                             const TrainConfig& cfg, const FusionArch& arch) {
  if (k <= 0 || k > static_cast<int>(data.subjects.size()))
    throw std::invalid_argument("loso_crossval: k must be in [1, #subjects]");
  CrossvalResult out;
  for (int fold = 0; fold < k; ++fold) {
    int left_out = data.subjects[fold];
    Dataset fold_data = data;
    split_by_subject(fold_data, left_out, 0.1, cfg.rng_seed + fold);

    // Leakage assertion: the held-out subject must be absent from train/val.
    for (const Collection& c : fold_data.collections) {
      Split tag = fold_data.split_tags.at(c.id);
      if (c.subject == left_out && tag != Split::Test)
        throw std::runtime_error("loso_crossval: subject leaked into training");
      if (c.subject != left_out && tag == Split::Test)
        throw std::runtime_error("loso_crossval: foreign subject in test fold");
    }

    TrainConfig fold_cfg = cfg;
    fold_cfg.rng_seed = cfg.rng_seed * 1000003ULL + static_cast<std::uint64_t>(fold);
    std::vector<InducerModel> inducers;
    for (int v = 0; v < fold_data.num_views; ++v)
      inducers.push_back(train_inducer(fold_data, v, task, fold_cfg));
    FusionModel fusion = train_fusion(fold_data, task, fold_cfg, arch);

    std::vector<const Collection*> test = fold_data.tagged(Split::Test);
    std::vector<const Collection*> val = fold_data.tagged(Split::Val);
    DiscountWeights discounts = fit_discounts(inducers, val, task);

    SingleViewSummary views = eval_single_views(inducers, test, task);
    for (size_t v = 0; v < views.per_view.size(); ++v) {
      EvalReport rep = views.per_view[v];
      rep.fold = fold;
      out.fold_macros[rep.method].push_back(rep.result.macro);
      out.fold_reports.push_back(std::move(rep));
    }
    out.fold_macros["AverageOfN"].push_back(views.average);
    out.fold_macros["BestOfN"].push_back(views.best);
    out.fold_macros["WorstOfN"].push_back(views.worst);

    std::vector<EvalReport> ens = eval_ensembles(
        inducers, fusion, discounts, test, task, EvalSubset::All);
    for (EvalReport& rep : ens) {
      rep.fold = fold;
      out.fold_macros[rep.method].push_back(rep.result.macro);
      out.fold_reports.push_back(std::move(rep));
    }
  }

  for (const auto& [method, macros] : out.fold_macros) {
    MethodStat s;
    s.mean = std::accumulate(macros.begin(), macros.end(), 0.0) /
             static_cast<double>(macros.size());
    for (double m : macros) s.variance += (m - s.mean) * (m - s.mean);
    s.variance /= static_cast<double>(macros.size());
    out.stats[method] = s;
  }
  return out;
}

void write_reports_csv(const std::vector<EvalReport>& reports,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report csv: " + path);
  out << "task,method,subset,fold,class,support,accuracy\n";
  std::ostringstream line;
  for (const EvalReport& rep : reports) {
    for (const ClassAccuracy& ca : rep.result.per_class) {
      out << task_key(rep.task) << ',' << rep.method << ',' << rep.subset
          << ',' << rep.fold << ',' << ca.cls << ',' << ca.support << ','
          << nlohmann::json(ca.accuracy).dump() << "\n";
    }
    out << task_key(rep.task) << ',' << rep.method << ',' << rep.subset << ','
        << rep.fold << ",-1,0," << nlohmann::json(rep.result.macro).dump()
        << "\n";
  }
}

namespace {

nlohmann::json report_to_json(const EvalReport& rep) {
  nlohmann::json j;
  j["task"] = task_key(rep.task);
  j["method"] = rep.method;
  j["subset"] = rep.subset;
  if (rep.fold >= 0) j["fold"] = rep.fold;
  j["macro_accuracy"] = rep.result.macro;
  j["complete_fraction"] = rep.complete_fraction;
  nlohmann::json per_class = nlohmann::json::array();
  for (const ClassAccuracy& ca : rep.result.per_class)
    per_class.push_back({{"class", ca.cls},
                         {"support", ca.support},
                         {"accuracy", ca.accuracy}});
  j["per_class"] = per_class;
  j["zero_support_classes"] = rep.result.zero_support;
  return j;
}

}  // namespace

void write_summary_json(const std::vector<EvalReport>& reports,
                        const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const EvalReport& rep : reports) arr.push_back(report_to_json(rep));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary json: " + path);
  out << arr.dump(2) << "\n";
}

void write_macro_svg(const std::vector<EvalReport>& reports,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write svg: " + path);
  const int bar_w = 28, gap = 8, chart_h = 220, label_h = 120;
  int width = 40 + static_cast<int>(reports.size()) * (bar_w + gap);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << (chart_h + label_h) << "\">\n";
  int x = 30;
  for (const EvalReport& rep : reports) {
    int h = static_cast<int>(rep.result.macro * chart_h);
    out << "<rect x=\"" << x << "\" y=\"" << (chart_h - h) << "\" width=\""
        << bar_w << "\" height=\"" << h << "\" fill=\"#4477aa\"/>\n";
    out << "<text x=\"" << (x + bar_w / 2) << "\" y=\"" << (chart_h + 12)
        << "\" font-size=\"9\" text-anchor=\"end\" transform=\"rotate(-60 "
        << (x + bar_w / 2) << " " << (chart_h + 12) << ")\">"
        << task_key(rep.task) << ":" << rep.method << "</text>\n";
    x += bar_w + gap;
  }
  out << "</svg>\n";
}

}  // namespace mvf
