// Command-line front end: clean, parse, stem, segment, align, stylo, fixture.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tibtext/tibtext.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tibtext;

namespace {

struct Globals {
  std::string data_dir = default_data_dir();
  std::string rules, costs;
  bool pretty = false;

  Resources resources() const {
    Resources r = load_resources(data_dir);
    if (!rules.empty()) r.rules = RuleSet::load(rules);
    if (!costs.empty()) r.costs = CostTable::load(costs);
    return r;
  }
};

class Output {
 public:
  explicit Output(const std::string& path, bool pretty) : path_(path), pretty_(pretty) {}
  ~Output() noexcept(false) { flush(); }

  void record(const json& j) { text_ += (pretty_ ? j.dump(2) : j.dump()) + "\n"; }
  void line(std::string_view s) {
    text_ += s;
    text_ += '\n';
  }

  void flush() {
    if (done_) return;
    done_ = true;
    if (path_.empty()) {
      std::cout << text_ << std::flush;
    } else {
      write_file(path_, text_);
    }
  }

 private:
  std::string path_;
  bool pretty_;
  std::string text_;
  bool done_ = false;
};

std::string doc_id(const std::string& path) { return fs::path(path).stem().string(); }

Document load_doc(const std::string& path, const Resources& res, bool do_clean) {
  std::string text = read_file(path);
  if (do_clean) text = clean(text, res.cleaning);
  return make_document(doc_id(path), text, res);
}

json optional_letter(std::optional<Letter> l) { return l ? json(std::string(wylie_form(*l))) : json(nullptr); }

json span_json(const Span& s) { return json::array({s.start, s.end}); }

Span span_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(Errc::bad_format, "span must be [start, end]");
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

std::string stem_key_hex(const Stem& s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(s.key()));
  return buf;
}

// Lines "<path> <label>"; relative paths are taken from the list's folder.
std::vector<std::pair<std::string, std::string>> read_label_list(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  const fs::path base = fs::path(path).parent_path();
  for (const auto& [no, line] : data_lines(read_file(path))) {
    auto f = split_ws(line);
    if (f.size() != 2) throw Error(Errc::bad_format, path + ":" + std::to_string(no) + ": expected '<path> <label>'");
    fs::path p(f[0]);
    out.emplace_back((p.is_relative() ? base / p : p).string(), f[1]);
  }
  return out;
}

struct FeatureConfig {
  bool style = true;
  std::size_t ngram_min = 0, ngram_max = 0;
  std::string segmenter;

  json to_json() const {
    return {{"style", style}, {"ngram_min", ngram_min}, {"ngram_max", ngram_max}, {"segmenter", segmenter}};
  }
  static FeatureConfig from_json(const json& j) {
    FeatureConfig c;
    c.style = j.value("style", true);
    c.ngram_min = j.value("ngram_min", std::size_t{0});
    c.ngram_max = j.value("ngram_max", std::size_t{0});
    c.segmenter = j.value("segmenter", std::string());
    return c;
  }
};

class Featurizer {
 public:
  Featurizer(FeatureConfig cfg, const Resources& res) : cfg_(std::move(cfg)), res_(res) {
    if (!cfg_.style && cfg_.ngram_max == 0) throw Error(Errc::invalid_argument, "no features selected");
    if ((cfg_.ngram_min == 0) != (cfg_.ngram_max == 0))
      throw Error(Errc::invalid_argument, "set both --ngram-min and --ngram-max, or neither");
    if (!cfg_.segmenter.empty()) segmenter_ = parse_model(read_file(cfg_.segmenter));
  }

  FeatureVector operator()(const Document& doc) const {
    FeatureVector fv;
    if (cfg_.style) fv = extract_style_features(doc, res_);
    if (cfg_.ngram_max > 0) {
      auto ng = extract_ngram_features(doc, cfg_.ngram_min, cfg_.ngram_max, segmenter_ ? &*segmenter_ : nullptr, &res_);
      fv.insert(ng.begin(), ng.end());
    }
    return fv;
  }

 private:
  FeatureConfig cfg_;
  const Resources& res_;
  std::optional<LinearModel> segmenter_;
};

void add_feature_options(CLI::App* cmd, FeatureConfig& cfg) {
  cmd->add_flag("!--no-style", cfg.style, "Leave out the six style features");
  cmd->add_option("--ngram-min", cfg.ngram_min, "Smallest n-gram order, 0 for none")->check(CLI::Range(0, 3));
  cmd->add_option("--ngram-max", cfg.ngram_max, "Largest n-gram order, 0 for none")->check(CLI::Range(0, 3));
  cmd->add_option("--segmenter", cfg.segmenter, "Segmenter model; n-gram units become words")
      ->check(CLI::ExistingFile);
}

json metrics_json(const ClassifierMetrics& m) {
  json per = json::object();
  for (const auto& [label, lm] : m.per_label)
    per[label] = {{"precision", lm.precision}, {"recall", lm.recall}, {"true_positive", lm.true_positive},
                  {"predicted", lm.predicted}, {"actual", lm.actual}};
  json confusion = json::array();
  for (const auto& [k, n] : m.confusion) confusion.push_back({{"gold", k.first}, {"predicted", k.second}, {"count", n}});
  return {{"accuracy", m.accuracy}, {"correct", m.correct}, {"total", m.total}, {"per_label", per},
          {"confusion", confusion}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tibetan text reuse and stylometry toolkit (Wylie input)", "tibtext"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", "tibtext 1.0.0");
  Globals g;
  app.add_option("--data", g.data_dir, "Data directory (tables, rules, costs, lexicons); env TIBTEXT_DATA")
      ->check(CLI::ExistingDirectory);
  app.add_option("--rules", g.rules, "Normalization rule file overriding the data directory")->check(CLI::ExistingFile);
  app.add_option("--costs", g.costs, "Cost table overriding the data directory")->check(CLI::ExistingFile);
  app.add_flag("--pretty", g.pretty, "Indented records and readable summaries");

  std::function<int()> action;

  // clean
  struct {
    std::string in, out, config;
  } cl;
  auto* c_clean = app.add_subcommand("clean", "Remove sigla, map punctuation, collapse whitespace");
  c_clean->add_option("--in", cl.in, "Raw text file")->required()->check(CLI::ExistingFile);
  c_clean->add_option("--out", cl.out, "Output file (default: standard output)");
  c_clean->add_option("--config", cl.config, "Cleaning config (default: data/cleaning.txt)")->check(CLI::ExistingFile);
  c_clean->callback([&] {
    action = [&] {
      CleaningConfig cfg = cl.config.empty() ? g.resources().cleaning : CleaningConfig::load(cl.config);
      Output out(cl.out, g.pretty);
      out.line(clean(read_file(cl.in), cfg));
      return 0;
    };
  });

  // parse / stem
  struct {
    std::string in, out;
    bool clean = false;
  } ps;
  auto* c_parse = app.add_subcommand("parse", "Slot tuple of every syllable, one record per line");
  auto* c_stem = app.add_subcommand("stem", "Normalized stem of every syllable, one record per line");
  for (auto* c : {c_parse, c_stem}) {
    c->add_option("--in", ps.in, "Cleaned Wylie text file")->required()->check(CLI::ExistingFile);
    c->add_option("--out", ps.out, "Output file (default: standard output)");
    c->add_flag("--clean", ps.clean, "Clean the input first");
  }
  c_parse->callback([&] {
    action = [&] {
      Resources res = g.resources();
      Document d = load_doc(ps.in, res, ps.clean);
      Output out(ps.out, g.pretty);
      for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& t = d.syllables[i];
        json j{{"doc", d.id}, {"index", i}, {"text", d.surface[i]}, {"foreign", t.foreign}};
        if (!t.foreign) {
          j["prescript"] = optional_letter(t.prescript);
          j["superscript"] = optional_letter(t.superscript);
          j["core"] = std::string(wylie_form(t.core));
          j["subscript"] = optional_letter(t.subscript);
          j["vowel"] = std::string(wylie_form(t.vowel));
          j["coda"] = optional_letter(t.coda);
          j["postscript"] = optional_letter(t.postscript);
          j["particle"] = t.particle ? json(*t.particle) : json(nullptr);
        }
        out.record(j);
      }
      return 0;
    };
  });
  c_stem->callback([&] {
    action = [&] {
      Resources res = g.resources();
      Document d = load_doc(ps.in, res, ps.clean);
      Output out(ps.out, g.pretty);
      for (std::size_t i = 0; i < d.size(); ++i)
        out.record({{"doc", d.id},
                    {"index", i},
                    {"text", d.surface[i]},
                    {"stem", d.stems[i].foreign() ? d.surface[i] : stem_text(d.stems[i])},
                    {"key", stem_key_hex(d.stems[i])},
                    {"foreign", d.stems[i].foreign()}});
      return 0;
    };
  });

  // segment
  auto* c_seg = app.add_subcommand("segment", "Word segmentation");
  c_seg->require_subcommand(1);
  struct {
    std::string corpus, model, in, out;
    SegmenterOptions opt;
    bool clean = false;
  } sg;
  auto* c_seg_train = c_seg->add_subcommand("train", "Train a segmenter on gold lines (words space-separated, syllables joined by _)");
  c_seg_train->add_option("--corpus", sg.corpus, "Gold segmented corpus")->required()->check(CLI::ExistingFile);
  c_seg_train->add_option("--model-out", sg.model, "Model file to write")->required();
  c_seg_train->add_option("--epochs", sg.opt.epochs, "Training epochs")->check(CLI::PositiveNumber);
  c_seg_train->add_option("--seed", sg.opt.seed, "Shuffling seed");
  c_seg_train->callback([&] {
    action = [&] {
      Resources res = g.resources();
      std::vector<SegmentedSentence> corpus;
      for (const auto& [no, line] : data_lines(read_file(sg.corpus))) {
        std::vector<std::string> syl;
        SegmentedSentence s;
        read_segmented_line(line, syl, s.tags);
        if (syl.empty()) continue;
        for (const auto& x : syl) s.syllables.push_back(analyze_syllable(x, res.tables));
        corpus.push_back(std::move(s));
      }
      LinearModel m = train_segmenter(corpus, sg.opt, &res.particles, &res.tables);
      write_file(sg.model, serialize_model(m));
      Output out("", g.pretty);
      out.record({{"model", sg.model}, {"sentences", corpus.size()}, {"weights", m.weights.size()}});
      return 0;
    };
  });
  auto* c_seg_apply = c_seg->add_subcommand("apply", "Segment a text; one sentence per output line");
  c_seg_apply->add_option("--model", sg.model, "Segmenter model")->required()->check(CLI::ExistingFile);
  c_seg_apply->add_option("--in", sg.in, "Cleaned Wylie text file")->required()->check(CLI::ExistingFile);
  c_seg_apply->add_option("--out", sg.out, "Output file (default: standard output)");
  c_seg_apply->add_flag("--clean", sg.clean, "Clean the input first");
  c_seg_apply->callback([&] {
    action = [&] {
      Resources res = g.resources();
      LinearModel m = parse_model(read_file(sg.model));
      Document d = load_doc(sg.in, res, sg.clean);
      Output out(sg.out, g.pretty);
      std::size_t begin = 0;
      auto emit = [&](std::size_t end) {
        if (end <= begin) return;
        std::vector<SyllableTuple> syl(d.syllables.begin() + static_cast<std::ptrdiff_t>(begin),
                                       d.syllables.begin() + static_cast<std::ptrdiff_t>(end));
        std::vector<std::string> surface(d.surface.begin() + static_cast<std::ptrdiff_t>(begin),
                                         d.surface.begin() + static_cast<std::ptrdiff_t>(end));
        std::string line;
        for (const auto& w : words_of(surface, segment(m, syl, &res.particles, &res.tables)))
          line += (line.empty() ? "" : " ") + w;
        out.line(line);
        begin = end;
      };
      for (std::size_t e : d.sentence_ends) emit(e + 1);
      emit(d.size());
      return 0;
    };
  });
  auto* c_seg_eval = c_seg->add_subcommand("eval", "Boundary precision, recall and F1 against a gold corpus");
  c_seg_eval->add_option("--model", sg.model, "Segmenter model")->required()->check(CLI::ExistingFile);
  c_seg_eval->add_option("--corpus", sg.corpus, "Gold segmented corpus")->required()->check(CLI::ExistingFile);
  c_seg_eval->callback([&] {
    action = [&] {
      Resources res = g.resources();
      LinearModel m = parse_model(read_file(sg.model));
      std::vector<Segmentation> gold, pred;
      for (const auto& [no, line] : data_lines(read_file(sg.corpus))) {
        std::vector<std::string> syl;
        Segmentation tags;
        read_segmented_line(line, syl, tags);
        std::vector<SyllableTuple> t;
        for (const auto& x : syl) t.push_back(analyze_syllable(x, res.tables));
        gold.push_back(std::move(tags));
        pred.push_back(segment(m, t, &res.particles, &res.tables));
      }
      auto s = boundary_f1(gold, pred);
      Output out("", g.pretty);
      out.record({{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"true_positive", s.true_positive},
                  {"predicted", s.predicted}, {"gold", s.gold}});
      return 0;
    };
  });

  // align
  auto* c_align = app.add_subcommand("align", "Parallel passage detection");
  c_align->require_subcommand(1);
  struct {
    std::string a, b, out, stats_out, pred, gold;
    AlignParams p;
    ChunkOptions chunk;
    double threshold = 0.9;
    bool clean = false;
  } al;
  auto* c_run = c_align->add_subcommand("run", "Align two documents; one passage record per line");
  c_run->add_option("--a", al.a, "First document")->required()->check(CLI::ExistingFile);
  c_run->add_option("--b", al.b, "Second document")->required()->check(CLI::ExistingFile);
  c_run->add_option("--out", al.out, "Output file (default: standard output)");
  c_run->add_option("--tau", al.p.error_budget, "Error budget: max path cost per syllable of span")
      ->check(CLI::Range(0.0, 0.999));
  c_run->add_option("--min-len", al.p.min_length, "Minimum passage length in syllables")->check(CLI::Range(2, 1 << 20));
  c_run->add_option("--gap", al.p.max_gap, "Max syllables skipped per step on each side")->check(CLI::Range(0, 64));
  c_run->add_option("--theta", al.p.vertex_threshold, "Max stem distance for a match")->check(CLI::NonNegativeNumber);
  c_run->add_option("--chunk-size", al.chunk.chunk_size, "Chunk length; longer documents are aligned in chunks")
      ->check(CLI::PositiveNumber);
  c_run->add_option("--overlap", al.chunk.overlap, "Overlap between neighbouring chunks");
  c_run->add_option("--workers", al.chunk.workers, "Worker threads for chunked alignment")->check(CLI::PositiveNumber);
  c_run->add_option("--stats-out", al.stats_out, "Also write variant and letter replacement statistics here");
  c_run->add_flag("--clean", al.clean, "Clean the inputs first");
  c_run->callback([&] {
    action = [&] {
      Resources res = g.resources();
      Document a = load_doc(al.a, res, al.clean), b = load_doc(al.b, res, al.clean);
      const bool chunked = std::max(a.size(), b.size()) > al.chunk.chunk_size;
      auto passages = chunked ? align_chunked(a, b, al.p, res.costs, al.chunk) : align_pair(a, b, al.p, res.costs);
      Output out(al.out, g.pretty);
      for (const auto& pp : passages) {
        json v = json::object();
        for (std::size_t k = 0; k < kVariantClasses; ++k) v[std::string(kVariantClassNames[k])] = pp.variants.counts[k];
        out.record({{"doc_a", a.id}, {"a_span", span_json(pp.a)}, {"doc_b", b.id}, {"b_span", span_json(pp.b)},
                    {"score", pp.score}, {"cost", pp.cost}, {"matched", pp.matched}, {"variants", v}});
      }
      if (!al.stats_out.empty()) {
        auto rep = replacement_stats(passages, a, b);
        json classes = json::object();
        for (std::size_t k = 0; k < kVariantClasses; ++k)
          classes[std::string(kVariantClassNames[k])] = rep.classes.counts[k];
        json slots = json::object();
        for (const auto& [slot, m] : rep.slot_changes) {
          json changes = json::object();
          for (const auto& [change, n] : m) changes[change] = n;
          slots[slot] = changes;
        }
        json j{{"passages", passages.size()}, {"aligned_positions", rep.aligned_positions}, {"classes", classes},
               {"slot_changes", slots}};
        write_file(al.stats_out, (g.pretty ? j.dump(2) : j.dump()) + "\n");
      }
      return 0;
    };
  });
  auto* c_eval = c_align->add_subcommand("eval", "Score passage records against a gold file");
  c_eval->add_option("--pred", al.pred, "Output of 'align run'")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--gold", al.gold, "Gold pair file")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--threshold", al.threshold, "Span overlap needed on both sides")->check(CLI::Range(0.001, 1.0));
  c_eval->callback([&] {
    action = [&] {
      std::vector<PredictedPassage> pred;
      std::size_t no = 0;
      for (const auto& [n, line] : data_lines(read_file(al.pred))) {
        no = n;
        try {
          auto j = json::parse(line);
          pred.push_back({j.at("doc_a").get<std::string>(), span_from(j.at("a_span")), j.at("doc_b").get<std::string>(),
                          span_from(j.at("b_span")), j.value("score", 0.0)});
        } catch (const json::exception& e) {
          throw Error(Errc::bad_format, al.pred + ":" + std::to_string(no) + ": " + e.what());
        }
      }
      auto gold = read_gold(read_file(al.gold));
      auto r = eval_alignment(pred, gold, al.threshold);
      json matched = json::array();
      for (auto [gi, pi] : r.matched) matched.push_back({gi, pi});
      Output out("", g.pretty);
      out.record({{"precision", r.precision}, {"recall", r.recall}, {"correct_predictions", r.correct_predictions},
                  {"predictions", r.predictions}, {"gold", r.gold}, {"matched", matched}});
      return 0;
    };
  });

  // stylo
  auto* c_stylo = app.add_subcommand("stylo", "Stylometric features and perceptron classification");
  c_stylo->require_subcommand(1);
  struct {
    std::vector<std::string> in;
    std::string labels, model, out;
    FeatureConfig features;
    PerceptronOptions opt;
    bool clean = false;
  } st;
  auto* c_feat = c_stylo->add_subcommand("features", "Feature vector of each document");
  c_feat->add_option("--in", st.in, "Documents")->required()->check(CLI::ExistingFile);
  c_feat->add_option("--out", st.out, "Output file (default: standard output)");
  c_feat->add_flag("--clean", st.clean, "Clean the inputs first");
  add_feature_options(c_feat, st.features);
  c_feat->callback([&] {
    action = [&] {
      Resources res = g.resources();
      Featurizer fz(st.features, res);
      Output out(st.out, g.pretty);
      for (const auto& path : st.in) {
        Document d = load_doc(path, res, st.clean);
        json f = json::object();
        for (const auto& [id, v] : fz(d)) f[id] = v;
        out.record({{"doc", d.id}, {"features", f}});
      }
      return 0;
    };
  });
  auto* c_train = c_stylo->add_subcommand("train", "Train a binary perceptron from a '<path> <label>' list");
  c_train->add_option("--labels", st.labels, "Training list")->required()->check(CLI::ExistingFile);
  c_train->add_option("--model-out", st.model, "Model file to write")->required();
  c_train->add_option("--epochs", st.opt.epochs, "Maximum epochs")->check(CLI::PositiveNumber);
  c_train->add_option("--lr", st.opt.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
  c_train->add_option("--seed", st.opt.seed, "Shuffling seed");
  c_train->add_flag("--clean", st.clean, "Clean the inputs first");
  add_feature_options(c_train, st.features);
  c_train->callback([&] {
    action = [&] {
      Resources res = g.resources();
      Featurizer fz(st.features, res);
      std::vector<LabeledExample> examples;
      for (const auto& [path, label] : read_label_list(st.labels))
        examples.push_back({fz(load_doc(path, res, st.clean)), label});
      LinearModel m = train_perceptron(examples, st.opt);
      m.meta["features"] = st.features.to_json();
      write_file(st.model, serialize_model(m));
      Output out("", g.pretty);
      out.record({{"model", st.model}, {"examples", examples.size()}, {"epochs_run", m.meta["epochs_run"]},
                  {"final_epoch_errors", m.meta["final_epoch_errors"]}});
      return 0;
    };
  });
  auto load_stylo_model = [&](const std::string& path) {
    LinearModel m = parse_model(read_file(path));
    if (m.kind != "stylo") throw Error(Errc::template_mismatch, "'" + path + "' is not a stylo model");
    return m;
  };
  auto* c_pred = c_stylo->add_subcommand("predict", "Label and margin for each document");
  c_pred->add_option("--model", st.model, "Stylo model")->required()->check(CLI::ExistingFile);
  c_pred->add_option("--in", st.in, "Documents")->required()->check(CLI::ExistingFile);
  c_pred->add_option("--out", st.out, "Output file (default: standard output)");
  c_pred->add_flag("--clean", st.clean, "Clean the inputs first");
  c_pred->callback([&] {
    action = [&] {
      Resources res = g.resources();
      LinearModel m = load_stylo_model(st.model);
      Featurizer fz(FeatureConfig::from_json(m.meta.value("features", json::object())), res);
      Output out(st.out, g.pretty);
      for (const auto& path : st.in) {
        Document d = load_doc(path, res, st.clean);
        auto p = m.predict(fz(d));
        out.record({{"doc", d.id}, {"label", p.label}, {"margin", p.margin}});
      }
      return 0;
    };
  });
  auto* c_seval = c_stylo->add_subcommand("eval", "Accuracy and per-label precision/recall on a '<path> <label>' list");
  c_seval->add_option("--model", st.model, "Stylo model")->required()->check(CLI::ExistingFile);
  c_seval->add_option("--labels", st.labels, "Test list")->required()->check(CLI::ExistingFile);
  c_seval->add_flag("--clean", st.clean, "Clean the inputs first");
  c_seval->callback([&] {
    action = [&] {
      Resources res = g.resources();
      LinearModel m = load_stylo_model(st.model);
      Featurizer fz(FeatureConfig::from_json(m.meta.value("features", json::object())), res);
      std::vector<LabeledExample> test;
      for (const auto& [path, label] : read_label_list(st.labels))
        test.push_back({fz(load_doc(path, res, st.clean)), label});
      Output out("", g.pretty);
      out.record(metrics_json(evaluate(m, test)));
      return 0;
    };
  });

  // fixture
  auto* c_fix = app.add_subcommand("fixture", "Synthetic data sets");
  c_fix->require_subcommand(1);
  struct {
    std::string out_dir, out;
    FixtureOptions gold;
    std::uint64_t seed = 1;
    std::size_t docs_per_class = 50, doc_length = 400, words = 50, sentences = 400;
  } fx;
  auto* c_gold = c_fix->add_subcommand("make-gold", "Two documents with planted mutated passages, gold file and plant log");
  c_gold->add_option("--out-dir", fx.out_dir, "Directory for fixture_a.txt, fixture_b.txt, gold.jsonl, plants.jsonl")
      ->required();
  c_gold->add_option("--seed", fx.gold.seed, "Generator seed");
  c_gold->add_option("--pairs", fx.gold.n_pairs, "Planted passages");
  c_gold->add_option("--min-plant", fx.gold.min_plant, "Shortest planted passage")->check(CLI::Range(3, 100000));
  c_gold->add_option("--max-plant", fx.gold.max_plant, "Longest planted passage")->check(CLI::Range(3, 100000));
  c_gold->add_option("--min-filler", fx.gold.min_filler, "Shortest background stretch");
  c_gold->add_option("--max-filler", fx.gold.max_filler, "Longest background stretch");
  c_gold->add_option("--particle-swap", fx.gold.rates.particle_swap, "Share of plant syllables with a particle swap")
      ->check(CLI::Range(0.0, 1.0));
  c_gold->add_option("--orthographic", fx.gold.rates.orthographic, "Share with an orthographic variant")
      ->check(CLI::Range(0.0, 1.0));
  c_gold->add_option("--inflectional", fx.gold.rates.inflectional, "Share with an inflectional variant")
      ->check(CLI::Range(0.0, 1.0));
  c_gold->add_option("--substitution", fx.gold.rates.substitution, "Share substituted by an unrelated syllable")
      ->check(CLI::Range(0.0, 1.0));
  c_gold->add_option("--gap", fx.gold.rates.gap, "Share deleted or followed by an insertion")->check(CLI::Range(0.0, 1.0));
  c_gold->add_option("--particle-rate", fx.gold.particle_rate, "Share of particles in generated text")
      ->check(CLI::Range(0.0, 0.9));
  c_gold->callback([&] {
    action = [&] {
      Resources res = g.resources();
      auto f = make_gold_fixture(fx.gold, res);
      fs::create_directories(fx.out_dir);
      const fs::path dir(fx.out_dir);
      write_file((dir / (f.id_a + ".txt")).string(), f.text_a + "\n");
      write_file((dir / (f.id_b + ".txt")).string(), f.text_b + "\n");
      write_file((dir / "gold.jsonl").string(), write_gold(f.gold));
      write_file((dir / "plants.jsonl").string(), write_plant_log(f.log));
      Output out("", g.pretty);
      out.record({{"dir", fx.out_dir}, {"syllables_a", f.syllables_a.size()}, {"syllables_b", f.syllables_b.size()},
                  {"gold_pairs", f.gold.size()}, {"mutations", f.log.size()}});
      return 0;
    };
  });
  auto* c_sty = c_fix->add_subcommand("make-stylo", "Two-class synthetic corpus (translated vs autochthonous style)");
  c_sty->add_option("--out-dir", fx.out_dir, "Directory for the documents and labels.txt")->required();
  c_sty->add_option("--seed", fx.seed, "Generator seed");
  c_sty->add_option("--docs-per-class", fx.docs_per_class, "Documents per class")->check(CLI::PositiveNumber);
  c_sty->add_option("--length", fx.doc_length, "Syllables per document")->check(CLI::PositiveNumber);
  c_sty->callback([&] {
    action = [&] {
      Resources res = g.resources();
      fs::create_directories(fx.out_dir);
      const fs::path dir(fx.out_dir);
      std::string labels;
      for (const auto& d : make_translationese_corpus(res, fx.seed, fx.docs_per_class, fx.doc_length)) {
        write_file((dir / (d.id + ".txt")).string(), d.text + "\n");
        labels += d.id + ".txt " + d.label + "\n";
      }
      write_file((dir / "labels.txt").string(), labels);
      Output out("", g.pretty);
      out.record({{"dir", fx.out_dir}, {"documents", 2 * fx.docs_per_class}});
      return 0;
    };
  });
  auto* c_lex = c_fix->add_subcommand("make-lexicon", "Gold segmented corpus drawn from a small synthetic lexicon");
  c_lex->add_option("--out", fx.out, "Corpus file to write")->required();
  c_lex->add_option("--seed", fx.seed, "Generator seed");
  c_lex->add_option("--words", fx.words, "Lexicon size")->check(CLI::PositiveNumber);
  c_lex->add_option("--sentences", fx.sentences, "Sentences")->check(CLI::PositiveNumber);
  c_lex->callback([&] {
    action = [&] {
      Resources res = g.resources();
      auto corpus = make_lexicon_corpus(res.tables, fx.seed, fx.words, fx.sentences);
      std::string text;
      for (const auto& line : corpus.lines) text += line + "\n";
      write_file(fx.out, text);
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    return action ? action() : 2;
  } catch (const Error& e) {
    std::cerr << "tibtext: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "tibtext: " << e.what() << "\n";
    return 1;
  }
}
