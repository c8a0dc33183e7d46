#include "mplr/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include "mplr/indicators.hpp"
#include "mplr/kg.hpp"
#include "mplr/model.hpp"
#include "mplr/train.hpp"

namespace mplr::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

// Exit with a specific code once the message has been printed.
struct CliError : std::runtime_error {
  CliError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

struct Key {
  std::string name;
  std::string default_value;
  std::string help;
  std::vector<std::string> commands;  // empty = every subcommand
  bool flag = false;
};

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"dataset-dir", "", "directory holding train.txt, valid.txt, test.txt", {}},
      {"out", "runs", "output directory", {}},
      {"seed", "0", "random seed", {}},
      {"threads", "1", "worker threads", {}},
      {"overwrite", "false", "replace existing outputs", {}, true},
      {"max-rule-len", "2", "maximum rule length L", {"indicators", "train"}},
      {"top-n", "0", "rows per predicate (indicators: 0 = all; rules: default 10)", {"indicators", "rules"}},
      {"sample", "0", "sample this many triples before computing saturations (0 = full graph)", {"indicators"}},
      {"direct-edge", "exclude", "exclude|include the triplet's own edge when counting paths", {"indicators"}},
      {"lambda-max", "7", "largest lambda in bifurcation reports", {"indicators"}},
      {"budget", "1e10", "largest admissible saturation cost |P|^(L+1)*|G|", {"indicators"}},
      {"query", "", "restrict to one predicate (default: all)", {"indicators", "rules"}},
      {"rank", "3", "number of attention chains R", {"train"}},
      {"epochs", "10", "maximum training epochs", {"train"}},
      {"patience", "3", "epochs without valid MRR improvement before stopping", {"train"}},
      {"batch-size", "128", "queries per mini-batch", {"train"}},
      {"learning-rate", "0.001", "Adam learning rate", {"train"}},
      {"hidden-dim", "128", "recurrent hidden size", {"train"}},
      {"embedding-dim", "128", "query embedding size", {"train"}},
      {"normalization", "l1", "none|l1|l2 scaling of each chain's final state", {"train"}},
      {"epsilon-mode", "corrected", "corrected|literal direct-edge correction", {"train"}},
      {"add-inverse", "false", "add an inv_<p> predicate with reversed edges to the training graph",
       {"train", "eval", "rules"}, true},
      {"graph", "all", "splits folded into the reasoning graph: all|train", {"train", "eval", "rules"}},
      {"checkpoint", "", "model checkpoint (default: <out>/model.ckpt)", {"eval", "rules"}},
      {"split", "test", "valid|test", {"eval"}},
      {"hits", "1,3,10", "comma-separated k values for Hit@k", {"eval"}},
  };
  return table;
}

bool applies(const Key& k, const std::string& command) {
  return k.commands.empty() || std::find(k.commands.begin(), k.commands.end(), command) != k.commands.end();
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Settings {
 public:
  Settings(std::string command, std::map<std::string, std::string> values)
      : command_(std::move(command)), values_(std::move(values)) {}

  const std::string& command() const { return command_; }
  const std::map<std::string, std::string>& values() const { return values_; }
  bool has(const std::string& k) const { return !str(k).empty(); }

  const std::string& str(const std::string& k) const {
    auto it = values_.find(k);
    if (it == values_.end()) throw std::logic_error("unregistered key " + k);
    return it->second;
  }

  std::uint64_t size(const std::string& k, std::uint64_t lo, std::uint64_t hi = UINT64_MAX) const {
    const std::string& v = str(k);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || out < lo || out > hi) {
      throw CliError(kExitError, "--" + k + ": expected an integer in [" + std::to_string(lo) + ", " +
                                     (hi == UINT64_MAX ? std::string("inf") : std::to_string(hi)) + "], got '" +
                                     v + "'");
    }
    return out;
  }

  double real(const std::string& k, double lo, double hi) const {
    const std::string& v = str(k);
    std::size_t used = 0;
    double out = 0.0;
    try {
      out = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size() || !(out >= lo && out <= hi)) {
      throw CliError(kExitError, "--" + k + ": expected a number in [" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "], got '" + v + "'");
    }
    return out;
  }

  bool boolean(const std::string& k) const {
    const std::string& v = str(k);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw CliError(kExitError, "--" + k + ": expected true|false, got '" + v + "'");
  }

  template <class Parse>
  auto choice(const std::string& k, Parse parse) const {
    try {
      return parse(str(k));
    } catch (const std::invalid_argument& e) {
      throw CliError(kExitError, "--" + k + ": " + e.what());
    }
  }

 private:
  std::string command_;
  std::map<std::string, std::string> values_;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// Collects output files so nothing is written until every result is ready.
class Outputs {
 public:
  Outputs(fs::path dir, bool overwrite) : dir_(std::move(dir)), overwrite_(overwrite) {}

  fs::path path(const std::string& name) const { return dir_ / name; }

  /// Fails before any work when a target exists and overwriting is off.
  void reserve(const std::vector<std::string>& names) const {
    for (const auto& n : names) {
      if (!overwrite_ && fs::exists(path(n))) {
        throw CliError(kExitError, "refusing to overwrite " + path(n).string() + " (pass --overwrite)");
      }
    }
  }

  void add(const std::string& name, std::function<void(std::ostream&)> writer) {
    pending_.emplace_back(name, std::move(writer));
  }

  void commit() {
    fs::create_directories(dir_);
    for (auto& [name, writer] : pending_) {
      const fs::path target = path(name), tmp = path(name + ".tmp");
      {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw CliError(kExitError, "cannot write " + tmp.string());
        writer(f);
        if (!f) throw CliError(kExitError, "write failed: " + tmp.string());
      }
      fs::rename(tmp, target);
    }
    pending_.clear();
  }

 private:
  fs::path dir_;
  bool overwrite_;
  std::vector<std::pair<std::string, std::function<void(std::ostream&)>>> pending_;
};

void add_manifest(Outputs& outputs, const Settings& s, const std::map<std::string, std::string>& conventions) {
  const std::string ts = utc_timestamp();
  outputs.add("manifest_" + s.command() + ".txt", [&s, conventions, ts](std::ostream& out) {
    out << "timestamp = " << ts << '\n';
    out << "command = " << s.command() << '\n';
    out << "version = " << kVersion << '\n';
    for (const auto& [k, v] : s.values()) out << "config." << k << " = " << v << '\n';
    for (const auto& [k, v] : conventions) out << "convention." << k << " = " << v << '\n';
  });
}

Dataset load(const Settings& s, const LoadOptions& options) {
  if (!s.has("dataset-dir")) throw CliError(kExitError, "--dataset-dir is required");
  const fs::path dir = s.str("dataset-dir");
  for (const char* f : {"train.txt", "valid.txt", "test.txt"}) {
    if (!fs::is_regular_file(dir / f)) throw CliError(kExitError, "missing dataset file " + (dir / f).string());
  }
  return load_dataset_dir(dir, options);
}

LoadOptions model_graph(const Settings& s) {
  LoadOptions o;
  const std::string& g = s.str("graph");
  if (g == "train") {
    o.graph_from_valid = false;
    o.graph_from_test = false;
  } else if (g != "all") {
    throw CliError(kExitError, "--graph: expected all|train, got '" + g + "'");
  }
  o.add_inverse = s.boolean("add-inverse");
  return o;
}

std::vector<PredicateId> selected_predicates(const Settings& s, const KnowledgeGraph& kg) {
  std::vector<PredicateId> out;
  if (s.has("query")) {
    const auto id = kg.predicates().find(s.str("query"));
    if (!id) throw CliError(kExitError, "unknown predicate '" + s.str("query") + "'");
    out.push_back(*id);
  } else {
    for (PredicateId p = 0; p < kg.num_predicates(); ++p) out.push_back(p);
  }
  return out;
}

std::string predicate_list(const KnowledgeGraph& kg) {
  std::string joined;
  for (const auto& n : kg.predicates().names()) joined += (joined.empty() ? "" : ",") + n;
  return joined;
}

ModelParams load_model(const Settings& s, const Outputs& outputs, const KnowledgeGraph& kg) {
  const fs::path ckpt = s.has("checkpoint") ? fs::path(s.str("checkpoint")) : outputs.path("model.ckpt");
  if (!fs::is_regular_file(ckpt)) throw CliError(kExitError, "checkpoint not found: " + ckpt.string());
  std::map<std::string, std::string> meta;
  ModelParams params = load_checkpoint(ckpt, &meta);
  if (params.config().num_predicates != kg.num_predicates() ||
      (meta.count("predicates") && meta.at("predicates") != predicate_list(kg))) {
    throw CliError(kExitError, "checkpoint " + ckpt.string() + " was trained on a different predicate vocabulary");
  }
  return params;
}

int cmd_indicators(const Settings& s, std::ostream& out, std::ostream& err) {
  const std::size_t L = s.size("max-rule-len", 2, 4);
  const std::size_t lambda_max = s.size("lambda-max", 2, 1000);
  const std::size_t top_n = s.size("top-n", 0);
  const std::size_t sample = s.size("sample", 0);
  const double budget = s.real("budget", 1.0, 1e300);
  const DirectEdge direct = s.choice("direct-edge", [](const std::string& v) {
    if (v == "exclude") return DirectEdge::Exclude;
    if (v == "include") return DirectEdge::Include;
    throw std::invalid_argument("expected exclude|include, got '" + v + "'");
  });
  Outputs outputs(s.str("out"), s.boolean("overwrite"));
  outputs.reserve({"saturation.tsv", "saturation.txt", "bifurcation.tsv", "bifurcation.txt", "bifurcation_test.tsv",
                   "manifest_indicators.txt"});

  const Dataset ds = load(s, LoadOptions{});
  const auto preds = selected_predicates(s, ds.graph);

  std::optional<KnowledgeGraph> sampled;
  if (sample > 0 && sample < ds.graph.triples().size()) sampled = sample_subgraph(ds.graph, s.size("seed", 0), sample);
  const KnowledgeGraph& sat_graph = sampled ? *sampled : ds.graph;
  const double cost = saturation_cost(sat_graph, L);
  if (cost > budget) {
    err << "saturation cost " << cost << " exceeds the budget " << budget
        << "; rerun with --sample <triples> or a larger --budget\n";
    return kExitBudget;
  }

  SaturationReport report = saturation_report(sat_graph, L, top_n, direct);
  if (s.has("query")) {
    std::erase_if(report.rows, [&](const SaturationRecord& r) { return r.predicate != preds.front(); });
  }
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';

  std::vector<BifurcationRecord> bif, bif_test;
  for (PredicateId q : preds) {
    if (ds.graph.per_predicate(q).empty()) continue;
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      bif.push_back(bifurcation(ds.graph, q, d, lambda_max));
      bool in_test = std::any_of(ds.splits.test.begin(), ds.splits.test.end(),
                                 [q](const Triple& t) { return t.predicate == q; });
      if (in_test) {
        bif_test.push_back(bifurcation(ds.splits.test, ds.graph.num_entities(), q, d, lambda_max,
                                       ds.graph.predicates().name(q)));
      }
    }
  }

  const KnowledgeGraph& kg = ds.graph;
  outputs.add("saturation.tsv", [&](std::ostream& o) { write_saturation_tsv(o, sat_graph, report); });
  outputs.add("saturation.txt", [&](std::ostream& o) { write_saturation_table(o, sat_graph, report); });
  outputs.add("bifurcation.tsv", [&](std::ostream& o) { write_bifurcation_tsv(o, kg, bif); });
  outputs.add("bifurcation.txt", [&](std::ostream& o) { write_bifurcation_table(o, kg, bif); });
  outputs.add("bifurcation_test.tsv", [&](std::ostream& o) { write_bifurcation_tsv(o, kg, bif_test); });
  add_manifest(outputs, s,
               {{"direct_edge", direct == DirectEdge::Exclude ? "exclude" : "include"},
                {"sampled_triples", sampled ? std::to_string(sampled->triples().size()) : "none"},
                {"micro_denominator_lengths", "2.." + std::to_string(L)}});
  outputs.commit();
  out << "wrote indicator reports to " << s.str("out") << " (" << report.rows.size() << " saturation rows, "
      << bif.size() << " bifurcation rows)\n";
  return kExitOk;
}

int cmd_train(const Settings& s, std::ostream& out, std::ostream& err) {
  TrainConfig cfg;
  cfg.max_rule_len = s.size("max-rule-len", 1, 6);
  cfg.rank = s.size("rank", 1, 64);
  cfg.max_epochs = s.size("epochs", 1);
  cfg.patience = s.size("patience", 1);
  cfg.batch_size = s.size("batch-size", 1);
  cfg.learning_rate = s.real("learning-rate", 1e-12, 10.0);
  cfg.hidden_dim = s.size("hidden-dim", 1, 4096);
  cfg.embedding_dim = s.size("embedding-dim", 1, 4096);
  cfg.normalization = s.choice("normalization", parse_normalization);
  cfg.epsilon_mode = s.choice("epsilon-mode", parse_epsilon_mode);
  cfg.seed = s.size("seed", 0);
  cfg.threads = s.size("threads", 1, 1024);
  Outputs outputs(s.str("out"), s.boolean("overwrite"));
  outputs.reserve({"model.ckpt", "train_log.tsv", "manifest_train.txt"});

  const Dataset ds = load(s, model_graph(s));
  TrainResult result = train(ds.graph, ds.splits, cfg, [&err](const EpochLog& e) {
    err << "epoch " << e.epoch << "  train_loss " << e.train_loss << "  valid_mrr " << e.valid_mrr << '\n';
  });

  const std::map<std::string, std::string> meta = {{"predicates", predicate_list(ds.graph)},
                                                   {"best_epoch", std::to_string(result.best_epoch)}};
  outputs.add("model.ckpt", [&](std::ostream& o) { save_checkpoint(o, result.best, meta); });
  outputs.add("train_log.tsv", [&](std::ostream& o) { write_training_log(o, result.log); });
  add_manifest(outputs, s,
               {{"epsilon_mode", to_string(cfg.epsilon_mode)},
                {"normalization", to_string(cfg.normalization)},
                {"graph", s.str("graph") == "all" ? "train + valid + test" : "train"},
                {"optimizer", "adam beta1=0.9 beta2=0.999 eps=1e-8"}});
  outputs.commit();
  out << "best epoch " << result.best_epoch << " valid MRR " << result.best_valid_mrr << "; checkpoint "
      << outputs.path("model.ckpt").string() << '\n';
  return kExitOk;
}

int cmd_eval(const Settings& s, std::ostream& out, std::ostream&) {
  std::vector<std::size_t> ks;
  {
    std::stringstream in(s.str("hits"));
    std::string item;
    while (std::getline(in, item, ',')) {
      std::size_t k = 0;
      const std::string t = trim(item);
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), k);
      if (ec != std::errc() || ptr != t.data() + t.size() || k == 0) {
        throw CliError(kExitError, "--hits: bad value '" + item + "'");
      }
      ks.push_back(k);
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  }
  const std::string split_name = s.str("split");
  if (split_name != "test" && split_name != "valid") throw CliError(kExitError, "--split: expected valid|test");
  Outputs outputs(s.str("out"), s.boolean("overwrite"));
  const std::string tsv = "eval_" + split_name + ".tsv", summary = "eval_" + split_name + ".txt";
  outputs.reserve({tsv, summary, "manifest_eval.txt"});

  const Dataset ds = load(s, model_graph(s));
  const ModelParams params = load_model(s, outputs, ds.graph);
  const auto& split = split_name == "test" ? ds.splits.test : ds.splits.valid;
  if (split.empty()) throw CliError(kExitError, "the " + split_name + " split is empty");
  const OperatorSet ops(ds.graph);
  const EvalReport report = evaluate(ops, params, split, ks, s.size("threads", 1, 1024));

  outputs.add(tsv, [&](std::ostream& o) { write_eval_tsv(o, ds.graph, report); });
  outputs.add(summary, [&](std::ostream& o) { write_eval_summary(o, ds.graph, report); });
  add_manifest(outputs, s,
               {{"tie_rule", "mean rank of tied block"},
                {"candidates", "all entities except the head"},
                {"direct_edge", "excluded from propagation"},
                {"normalization", to_string(params.config().normalization)}});
  outputs.commit();
  out << std::setprecision(4) << split_name << " MRR " << report.mrr;
  for (const auto& [k, v] : report.hit_at) out << "  Hit@" << k << ' ' << v;
  out << '\n';
  return kExitOk;
}

int cmd_rules(const Settings& s, std::ostream& out, std::ostream&) {
  const std::size_t top_n = s.size("top-n", 0) == 0 ? 10 : s.size("top-n", 1);
  Outputs outputs(s.str("out"), s.boolean("overwrite"));
  outputs.reserve({"rules.tsv", "rules.txt", "manifest_rules.txt"});
  const Dataset ds = load(s, model_graph(s));
  const ModelParams params = load_model(s, outputs, ds.graph);

  std::vector<std::vector<ExtractedRule>> all;
  for (PredicateId q : selected_predicates(s, ds.graph)) all.push_back(extract_rules(params, q, top_n));

  const KnowledgeGraph& kg = ds.graph;
  outputs.add("rules.tsv", [&](std::ostream& o) {
    o << "predicate\trank\tconfidence\tbody\n" << std::setprecision(10);
    for (const auto& rules : all) {
      for (std::size_t i = 0; i < rules.size(); ++i) {
        o << kg.predicates().name(rules[i].predicate) << '\t' << i + 1 << '\t' << rules[i].confidence << '\t'
          << format_pattern(kg, rules[i].hops) << '\n';
      }
    }
  });
  outputs.add("rules.txt", [&](std::ostream& o) {
    for (const auto& rules : all) {
      if (rules.empty()) continue;
      o << "## " << kg.predicates().name(rules.front().predicate) << '\n';
      write_rules_table(o, kg, rules);
      o << '\n';
    }
  });
  add_manifest(outputs, s, {{"confidence", "sum over ranks of the product of hop attentions"}});
  outputs.commit();
  out << "wrote " << outputs.path("rules.txt").string() << '\n';
  return kExitOk;
}

int cmd_stats(const Settings& s, std::ostream& out, std::ostream&) {
  Outputs outputs(s.str("out"), s.boolean("overwrite"));
  outputs.reserve({"stats.txt", "stats.tsv", "manifest_stats.txt"});
  const Dataset ds = load(s, LoadOptions{});
  const KnowledgeGraph& kg = ds.graph;

  outputs.add("stats.txt", [&](std::ostream& o) { write_load_summary(o, ds.summary); });
  outputs.add("stats.tsv", [&](std::ostream& o) {
    o << "predicate\ttriples\theads\ttails\tmax_fw_degree\tmax_bw_degree\n";
    for (PredicateId q = 0; q < kg.num_predicates(); ++q) {
      const DegreeTable d = degree_table(kg, q);
      const auto nz = [](const std::vector<std::uint32_t>& v) {
        return std::count_if(v.begin(), v.end(), [](std::uint32_t x) { return x > 0; });
      };
      const auto mx = [](const std::vector<std::uint32_t>& v) {
        return v.empty() ? 0u : *std::max_element(v.begin(), v.end());
      };
      o << kg.predicates().name(q) << '\t' << kg.per_predicate(q).size() << '\t' << nz(d.forward) << '\t'
        << nz(d.backward) << '\t' << mx(d.forward) << '\t' << mx(d.backward) << '\n';
    }
  });
  add_manifest(outputs, s, {{"graph", "train + valid + test"}});
  outputs.commit();
  write_load_summary(out, ds.summary);
  return kExitOk;
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-target rule learning over knowledge graphs", "mplr"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  static const std::map<std::string, std::string> kAbout = {
      {"indicators", "saturation and bifurcation reports"},
      {"train", "train a model and write a checkpoint"},
      {"eval", "rank test triples with a checkpoint"},
      {"rules", "extract ranked rules from a checkpoint"},
      {"stats", "dataset summary and per-predicate degrees"},
  };
  std::map<std::string, std::map<std::string, std::string>> given;
  std::map<std::string, std::string> config_path;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, about] : kAbout) {
    CLI::App* sub = app.add_subcommand(name, about);
    subs[name] = sub;
    sub->add_option("--config", config_path[name], "flat key = value file; flags override it");
    for (const auto& k : keys()) {
      if (!applies(k, name)) continue;
      const std::string desc = k.help + (k.default_value.empty() ? "" : " [" + k.default_value + "]");
      if (k.flag) {
        sub->add_flag_callback("--" + k.name, [&given, name, key = k.name] { given[name][key] = "true"; }, desc);
      } else {
        sub->add_option("--" + k.name, given[name][k.name], desc);
      }
    }
  }

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    std::string command;
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) command = name;
    }
    std::map<std::string, std::string> file_values;
    if (!config_path[command].empty()) {
      if (!fs::is_regular_file(config_path[command])) {
        throw CliError(kExitError, "config file not found: " + config_path[command]);
      }
      file_values = parse_config_file(config_path[command]);
      for (const auto& [k, v] : file_values) {
        const bool known = std::any_of(keys().begin(), keys().end(), [&](const Key& key) { return key.name == k; });
        if (!known) throw CliError(kExitError, "unknown config key '" + k + "' in " + config_path[command]);
      }
    }
    std::map<std::string, std::string> resolved;
    for (const auto& k : keys()) {
      if (!applies(k, command)) continue;
      std::string v = k.default_value;
      if (auto it = file_values.find(k.name); it != file_values.end()) v = it->second;
      const CLI::App* sub = subs[command];
      if (k.flag ? given[command].count(k.name) > 0 : sub->get_option("--" + k.name)->count() > 0) {
        v = given[command][k.name];
      }
      resolved[k.name] = v;
    }
    const Settings settings(command, resolved);
    // Keys shared by every command are checked even where a command ignores them.
    settings.size("seed", 0);
    settings.size("threads", 1, 1024);
    settings.boolean("overwrite");
    if (command == "indicators") return cmd_indicators(settings, out, err);
    if (command == "train") return cmd_train(settings, out, err);
    if (command == "eval") return cmd_eval(settings, out, err);
    if (command == "rules") return cmd_rules(settings, out, err);
    return cmd_stats(settings, out, err);
  } catch (const CliError& e) {
    err << "error: " << e.what() << '\n';
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace mplr::cli
