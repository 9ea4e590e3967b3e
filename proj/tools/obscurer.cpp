// Copyright 2026-present the obscurer project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// obscurer: command-line front end for corpus building, indexing,
// serving and evaluation.

#include <httplib.h>

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <set>

#include "obscurer/annforest/index_io.h"
#include "obscurer/common/error.h"
#include "obscurer/common/image_io.h"
#include "obscurer/common/rng.h"
#include "obscurer/corpus/config.h"
#include "obscurer/corpus/datasets.h"
#include "obscurer/corpus/indexer.h"
#include "obscurer/evalkit/pilot.h"
#include "obscurer/evalkit/report.h"
#include "obscurer/evalkit/stats.h"
#include "obscurer/evalkit/trials.h"
#include "obscurer/filtertree/filter.h"
#include "obscurer/imagegen/render.h"
#include "obscurer/service/http.h"

namespace fs = std::filesystem;
using namespace obscurer;

namespace {

std::string slurp(const fs::path& p) {
  const auto bytes = read_file(p);
  return {bytes.begin(), bytes.end()};
}

void spill(const fs::path& p, const std::string& text) {
  write_file(p, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

struct CanvasArgs {
  int width = 256;
  int height = 256;
  int particles = 1000;
  int timesteps = 100;
  int blur = 1;
  std::string size;

  void add(CLI::App* app) {
    app->add_option("--size", size, "Canvas size as WxH (overrides --width/--height)");
    app->add_option("--width", width, "Canvas width")->capture_default_str();
    app->add_option("--height", height, "Canvas height")->capture_default_str();
    app->add_option("--particles", particles, "Particle count")->capture_default_str();
    app->add_option("--timesteps", timesteps, "Simulation steps")->capture_default_str();
    app->add_option("--blur", blur, "Box blur radius per step")->capture_default_str();
  }
  imagegen::CanvasSpec spec() const {
    imagegen::CanvasSpec c;
    c.width = width;
    c.height = height;
    if (!size.empty()) {
      const auto x = size.find('x');
      try {
        if (x == std::string::npos) throw std::invalid_argument(size);
        c.width = std::stoi(size.substr(0, x));
        c.height = std::stoi(size.substr(x + 1));
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::kInvalidArgument, "--size expects WxH, got " + size);
      }
    }
    c.particle_count = particles;
    c.timesteps = timesteps;
    c.blur_radius = blur;
    return c;
  }
};

std::string image_name(const std::string& dataset, std::uint64_t seed, int index) {
  return dataset + "_" + std::to_string(seed) + "_" + std::to_string(index);
}

// --- gen -----------------------------------------------------------------

void setup_gen(CLI::App& root) {
  auto* gen = root.add_subcommand("gen", "Render generative images")->require_subcommand(1);

  struct ParticleArgs {
    CanvasArgs canvas;
    std::uint64_t seed = 0;
    int count = 1;
    int max_depth = 5;
    std::string transform = "identity";
    std::string dataset = "abstract";
    fs::path out = ".";
    bool curate = false;
  };
  auto pa = std::make_shared<ParticleArgs>();
  auto* particle = gen->add_subcommand("particle", "Particle-system renders with genome sidecars");
  pa->canvas.add(particle);
  particle->add_option("--seed", pa->seed, "Base seed")->capture_default_str();
  particle->add_option("--count", pa->count, "Images to write")->capture_default_str();
  particle->add_option("--max-depth", pa->max_depth, "Expression depth bound")->capture_default_str();
  particle->add_option("--transform", pa->transform, "Line transform")->capture_default_str();
  particle->add_option("--dataset", pa->dataset, "File name prefix")->capture_default_str();
  particle->add_option("--out", pa->out, "Output directory")->capture_default_str();
  particle->add_flag("--curate", pa->curate, "Skip renders outside the coverage thresholds");
  particle->callback([pa] {
    const auto kind = imagegen::parse_transform(pa->transform);
    if (!kind) throw Error(ErrorCode::kInvalidArgument, "unknown transform " + pa->transform);
    imagegen::LineTransform t;
    t.kind = *kind;
    imagegen::Grammar g;
    g.max_depth = pa->max_depth;
    const auto canvas = pa->canvas.spec();
    fs::create_directories(pa->out);
    int written = 0;
    for (std::uint64_t attempt = 0; written < pa->count; ++attempt) {
      if (attempt >= static_cast<std::uint64_t>(pa->count) * corpus::kMaxAttemptsPerImage) {
        throw Error(ErrorCode::kBudgetExhausted, "curation rejected too many renders");
      }
      const auto genome = imagegen::random_genome(derive_seed(pa->seed, attempt), g);
      const auto img = imagegen::render_particle_image(genome, canvas, t);
      if (pa->curate) {
        const double cov = imagegen::coverage_score(img, imagegen::resolve_background(canvas, genome));
        if (!imagegen::CurationThresholds{}.accepts(cov)) continue;
      }
      const auto name = image_name(pa->dataset, pa->seed, written);
      save_png(img, pa->out / (name + ".png"));
      spill(pa->out / (name + ".txt"), imagegen::genome_to_text(genome));
      std::cout << (pa->out / (name + ".png")).string() << "\n";
      ++written;
    }
  });

  struct CoordArgs {
    CanvasArgs canvas;
    std::uint64_t seed = 0;
    int count = 1;
    int max_depth = 6;
    std::string dataset = "coord";
    fs::path out = ".";
  };
  auto ca = std::make_shared<CoordArgs>();
  auto* coord = gen->add_subcommand("coord", "Per-pixel (x, y) -> RGB expression renders");
  ca->canvas.add(coord);
  coord->add_option("--seed", ca->seed, "Base seed")->capture_default_str();
  coord->add_option("--count", ca->count, "Images to write")->capture_default_str();
  coord->add_option("--max-depth", ca->max_depth, "Expression depth bound")->capture_default_str();
  coord->add_option("--dataset", ca->dataset, "File name prefix")->capture_default_str();
  coord->add_option("--out", ca->out, "Output directory")->capture_default_str();
  coord->callback([ca] {
    imagegen::Grammar g;
    g.max_depth = ca->max_depth;
    g.validate();
    const auto canvas = ca->canvas.spec();
    fs::create_directories(ca->out);
    for (int i = 0; i < ca->count; ++i) {
      Rng rng(derive_seed(ca->seed, static_cast<std::uint64_t>(i)));
      std::array<imagegen::ExprPtr, 3> rgb;
      for (auto& e : rgb) e = imagegen::random_tree(rng, imagegen::kCoordinateInputs, g.max_depth, g);
      const auto img = imagegen::render_coordinate_image(*rgb[0], *rgb[1], *rgb[2], canvas);
      const auto name = image_name(ca->dataset, ca->seed, i);
      save_png(img, ca->out / (name + ".png"));
      spill(ca->out / (name + ".txt"), "r " + imagegen::to_sexpr(*rgb[0]) + "\ng " +
                                           imagegen::to_sexpr(*rgb[1]) + "\nb " +
                                           imagegen::to_sexpr(*rgb[2]) + "\n");
      std::cout << (ca->out / (name + ".png")).string() << "\n";
    }
  });
}

// --- filter --------------------------------------------------------------

void setup_filter(CLI::App& root) {
  auto* filter = root.add_subcommand("filter", "Random image filter trees")->require_subcommand(1);

  struct Args {
    std::uint64_t seed = 0;
    int count = 1000;
    int max_depth = 4;
    fs::path out;
    fs::path in;
    int index = 0;
  };
  auto a = std::make_shared<Args>();

  auto* build = filter->add_subcommand(
      "build", "Generate a filter library; with --sources, filter every source image");
  build->add_option("--seed", a->seed, "Library seed")->capture_default_str();
  build->add_option("--count", a->count, "Number of filters")->capture_default_str();
  build->add_option("--max-depth", a->max_depth, "Operator depth bound")->capture_default_str();
  build->add_option("--sources", a->in, "Directory of source images");
  build->add_option("--out", a->out, "Output directory")->required();
  build->callback([a] {
    const auto lib = filtertree::random_filter_library(a->seed, a->count, a->max_depth);
    if (a->in.empty()) {
      fs::create_directories(a->out);
      for (std::size_t i = 0; i < lib.filters.size(); ++i) {
        spill(a->out / ("filter_" + std::to_string(i) + ".txt"),
              filtertree::to_sexpr(*lib.filters[i]) + "\n");
      }
      std::cout << lib.filters.size() << " filters written to " << a->out.string() << "\n";
      return;
    }
    const auto sources = corpus::load_source_images(a->in);
    if (sources.empty()) {
      throw Error(ErrorCode::kEmptyInput, "no decodable images in " + a->in.string());
    }
    const auto frag = corpus::build_filtered_dataset(sources, lib, a->out, ".");
    std::cout << frag.records.size() << " images (" << sources.size() << " sources x "
              << lib.filters.size() << " filters) written to " << a->out.string() << "\n";
  });

  auto* apply = filter->add_subcommand("apply", "Apply one filter of a library to an image");
  apply->add_option("--seed", a->seed, "Library seed")->capture_default_str();
  apply->add_option("--count", a->count, "Library size")->capture_default_str();
  apply->add_option("--max-depth", a->max_depth, "Operator depth bound")->capture_default_str();
  apply->add_option("--index", a->index, "Filter index")->capture_default_str();
  apply->add_option("--in", a->in, "Input image")->required();
  apply->add_option("--out", a->out, "Output PNG")->required();
  apply->callback([a] {
    const auto lib = filtertree::random_filter_library(a->seed, a->count, a->max_depth);
    if (a->index < 0 || a->index >= a->count) {
      throw Error(ErrorCode::kInvalidArgument, "--index outside the library");
    }
    const auto& f = *lib.filters[static_cast<std::size_t>(a->index)];
    save_png(filtertree::apply_filter(f, load_image(a->in)), a->out);
    std::cout << filtertree::to_sexpr(f) << "\n";
  });
}

// --- index ---------------------------------------------------------------

void setup_index(CLI::App& root) {
  auto* index = root.add_subcommand("index", "Random-projection forest files")->require_subcommand(1);

  struct Args {
    fs::path manifest;
    fs::path embeddings;
    fs::path out;
    fs::path idx;
    fs::path image;
    ann::ForestParams params;
    int k = 10;
    int search_k = ann::kDefaultSearchK;
  };
  auto a = std::make_shared<Args>();

  auto* build = index->add_subcommand("build", "Embed a manifest's images and build the index");
  build->add_option("--manifest", a->manifest, "Manifest file (updated in place)")->required();
  build->add_option("--out", a->out, "Index file")->required();
  build->add_option("--trees", a->params.n_trees, "Tree count")->capture_default_str();
  build->add_option("--leaf", a->params.leaf_size, "Leaf size")->capture_default_str();
  build->add_option("--seed", a->params.seed, "Build seed")->capture_default_str();
  build->add_option("--embeddings", a->embeddings,
                    "External embeddings file (id v1 v2 ... per line) instead of the descriptor");
  build->callback([a] {
    const auto manifest = corpus::DatasetManifest::load(a->manifest);
    corpus::IndexOptions opts;
    opts.forest = a->params;
    if (!a->embeddings.empty()) opts.external_embeddings = a->embeddings;
    const auto built = corpus::index_corpus(manifest, a->manifest.parent_path(), opts, a->out);
    built.manifest.save(a->manifest);
    std::cout << "indexed " << built.forest.size() << " images, dimension "
              << built.forest.dimension() << ", into " << a->out.string() << "\n";
  });

  auto* query = index->add_subcommand("query", "Nearest indexed images to an image file");
  query->add_option("--idx", a->idx, "Index file")->required();
  query->add_option("--manifest", a->manifest, "Manifest (default: manifest.txt beside the index)");
  query->add_option("--image", a->image, "Query image")->required();
  query->add_option("--k", a->k, "Result count")->capture_default_str();
  query->add_option("--search-k", a->search_k, "Candidate budget")->capture_default_str();
  query->callback([a] {
    const fs::path manifest =
        a->manifest.empty() ? a->idx.parent_path() / "manifest.txt" : a->manifest;
    const auto c = corpus::IndexedCorpus::open(manifest, a->idx);
    const auto q = c.embed(load_image(a->image));
    std::vector<const corpus::ImageRecord*> by_row(c.forest().size());
    for (const auto& rec : c.manifest().records) {
      by_row[static_cast<std::size_t>(rec.embedding_offset)] = &rec;
    }
    for (const auto& r : c.forest().query(q, a->k, std::max(a->search_k, a->k))) {
      const auto& rec = *by_row[r.id];
      std::cout << r.rank << "\t" << rec.id << "\t" << corpus::tag_name(rec.tag) << "\t"
                << r.distance << "\n";
    }
  });
}

// --- corpus --------------------------------------------------------------

void setup_corpus(CLI::App& root) {
  auto* corpus_cmd = root.add_subcommand("corpus", "Dataset corpus")->require_subcommand(1);

  struct Args {
    fs::path config;
    fs::path out;
    bool no_index = false;
    fs::path dir;
    fs::path image;
    int k = 10;
  };
  auto a = std::make_shared<Args>();

  auto* build = corpus_cmd->add_subcommand("build", "Build datasets, manifest and index");
  build->add_option("--config", a->config, "JSON config")->required();
  build->add_option("--out", a->out, "Output directory")->required();
  build->add_flag("--no-index", a->no_index, "Write the manifest only");
  build->callback([a] {
    const auto cfg = corpus::load_corpus_config(a->config);
    const auto built = corpus::build_corpus(cfg, a->out, !a->no_index);
    for (const auto& [tag, n] : built.manifest.counts()) {
      std::cout << corpus::tag_name(tag) << "\t" << n << "\n";
    }
    if (built.skipped) std::cerr << "skipped " << built.skipped << " undecodable file(s)\n";
    std::cout << "manifest\t" << built.manifest_path.string() << "\n";
    if (!built.index_path.empty()) std::cout << "index\t" << built.index_path.string() << "\n";
  });

  auto* query = corpus_cmd->add_subcommand("query", "Nearest images per dataset for an image file");
  query->add_option("--dir", a->dir, "Corpus directory (manifest.txt, index.cobs)")->required();
  query->add_option("--image", a->image, "Query image")->required();
  query->add_option("--k", a->k, "Results per dataset")->capture_default_str();
  query->callback([a] {
    const auto c = corpus::IndexedCorpus::open(a->dir / "manifest.txt", a->dir / "index.cobs");
    const auto q = c.embed(load_image(a->image));
    for (auto tag : c.datasets()) {
      for (const auto& hit : c.query_dataset(tag, q, a->k)) {
        std::cout << corpus::tag_name(tag) << "\t" << hit.record->id << "\t" << hit.distance << "\n";
      }
    }
  });
}

// --- serve ---------------------------------------------------------------

httplib::Server* g_server = nullptr;

void setup_serve(CLI::App& root) {
  struct Args {
    fs::path index;
    fs::path manifest;
    fs::path boards_dir;
    fs::path static_dir;
    std::string host = "127.0.0.1";
    int port = 8080;
  };
  auto a = std::make_shared<Args>();
  auto* serve = root.add_subcommand("serve", "Run the retrieval HTTP service");
  serve->add_option("--index", a->index, "Index file")->required();
  serve->add_option("--manifest", a->manifest, "Manifest file")->required();
  serve->add_option("--boards-dir", a->boards_dir, "Board and upload storage")->required();
  serve->add_option("--static", a->static_dir, "Directory served at /");
  serve->add_option("--host", a->host, "Bind address")->capture_default_str();
  serve->add_option("--port", a->port, "Port")->capture_default_str();
  serve->callback([a] {
    auto corpus = std::make_shared<const corpus::IndexedCorpus>(
        corpus::IndexedCorpus::open(a->manifest, a->index));
    service::RetrievalService svc(corpus, {a->boards_dir});
    httplib::Server server;
    std::optional<fs::path> static_dir;
    if (!a->static_dir.empty()) static_dir = a->static_dir;
    service::install_routes(server, svc, static_dir);
    g_server = &server;
    std::signal(SIGINT, [](int) { g_server->stop(); });
    std::signal(SIGTERM, [](int) { g_server->stop(); });
    std::cerr << "serving " << corpus->manifest().records.size() << " images on http://"
              << a->host << ":" << a->port << "\n";
    if (!server.listen(a->host, a->port)) {
      throw Error(ErrorCode::kIoError, "cannot listen on " + a->host + ":" + std::to_string(a->port));
    }
  });
}

// --- eval ----------------------------------------------------------------

std::vector<std::string> pick_seeds(const corpus::IndexedCorpus& c,
                                    const std::vector<std::string>& datasets, int per_dataset,
                                    std::uint64_t seed) {
  std::vector<std::string> out;
  for (const auto& name : datasets) {
    const auto tag = corpus::parse_tag(name);
    if (!tag) throw Error(ErrorCode::kInvalidArgument, "unknown dataset " + name);
    std::vector<const corpus::ImageRecord*> members(c.members(*tag).begin(), c.members(*tag).end());
    if (members.size() < static_cast<std::size_t>(per_dataset)) {
      throw Error(ErrorCode::kDatasetTooSmall, name + " has fewer than " +
                                                   std::to_string(per_dataset) + " images");
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(*tag)));
    for (int i = 0; i < per_dataset; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(members.size() - i));
      std::swap(members[i], members[j]);
      out.push_back(members[i]->id);
    }
  }
  return out;
}

void setup_eval(CLI::App& root) {
  auto* eval = root.add_subcommand("eval", "Evaluation tooling")->require_subcommand(1);

  struct Args {
    fs::path manifest;
    fs::path index;
    fs::path seeds;
    std::vector<std::string> datasets{"wikiart-like-external", "filtered", "abstract"};
    int per_dataset = 32;
    std::uint64_t seed = 0;
    int controls = 4;
    fs::path out;
    fs::path trials;
    fs::path responses;
    fs::path logs;
  };
  auto a = std::make_shared<Args>();

  auto* trials = eval->add_subcommand("trials", "Generate retrieved-vs-random trials");
  trials->add_option("--manifest", a->manifest, "Manifest file")->required();
  trials->add_option("--index", a->index, "Index file")->required();
  auto* seeds_opt = trials->add_option("--seeds", a->seeds, "File with one seed id per line");
  trials->add_option("--datasets", a->datasets, "Datasets to draw seeds from")
      ->excludes(seeds_opt)->capture_default_str();
  trials->add_option("--per-dataset", a->per_dataset, "Seeds per dataset")
      ->excludes(seeds_opt)->capture_default_str();
  trials->add_option("--seed", a->seed, "RNG seed")->capture_default_str();
  trials->add_option("--controls", a->controls, "Controls per 100 trials")->capture_default_str();
  trials->add_option("--out", a->out, "Trials CSV")->required();
  trials->callback([a] {
    const auto c = corpus::IndexedCorpus::open(a->manifest, a->index);
    std::vector<std::string> seeds;
    if (!a->seeds.empty()) {
      std::istringstream in(slurp(a->seeds));
      for (std::string line; std::getline(in, line);) {
        if (!line.empty()) seeds.push_back(line);
      }
    } else {
      seeds = pick_seeds(c, a->datasets, a->per_dataset, a->seed);
    }
    const auto list = evalkit::generate_trials(seeds, c, a->seed, a->controls);
    spill(a->out, evalkit::trials_to_csv(list));
    std::cout << list.size() << " trials written to " << a->out.string() << "\n";
  });

  auto* proxy = eval->add_subcommand(
      "proxy", "Machine-proxy responses (descriptor judges, not human raters)");
  proxy->add_option("--manifest", a->manifest, "Manifest file")->required();
  proxy->add_option("--index", a->index, "Index file")->required();
  proxy->add_option("--trials", a->trials, "Trials CSV")->required();
  proxy->add_option("--out", a->out, "Responses CSV")->required();
  proxy->callback([a] {
    const auto c = corpus::IndexedCorpus::open(a->manifest, a->index);
    const auto list = evalkit::parse_trials_csv(slurp(a->trials));
    const auto responses = evalkit::proxy_responses(list, c);
    spill(a->out, evalkit::responses_to_csv(responses));
    std::cout << responses.size() << " machine-proxy responses written to " << a->out.string()
              << "\n";
  });

  auto* report = eval->add_subcommand("report", "Accuracy table from trials and responses");
  report->add_option("--trials", a->trials, "Trials CSV")->required();
  report->add_option("--responses", a->responses, "Responses CSV")->required();
  report->callback([a] {
    const auto list = evalkit::parse_trials_csv(slurp(a->trials));
    const auto responses = evalkit::parse_responses_csv(slurp(a->responses));
    const auto r = evalkit::accuracy_report(list, responses);
    const bool proxy = std::all_of(responses.begin(), responses.end(), [](const auto& x) {
      return x.participant.starts_with(evalkit::kProxyParticipantPrefix);
    });
    if (proxy) std::cout << "NOTE: machine-proxy responses, not human judgements\n";
    std::cout << evalkit::format_table(r);
    std::cout << "binomial per-trial: " << r.per_trial.successes << "/" << r.per_trial.n
              << " p=" << r.per_trial.p_value << "\n";
    std::cout << "binomial per-image: " << r.per_image.successes << "/" << r.per_image.n
              << " p=" << r.per_image.p_value << "\n";
    if (r.control_responses) {
      std::cout << "controls: " << r.control_correct << "/" << r.control_responses
                << " chose the exact match\n";
    }
  });

  auto* pilot = eval->add_subcommand("pilot", "Session yield table from pilot logs");
  pilot->add_option("--logs", a->logs, "Pilot CSV")->required();
  pilot->callback([a] {
    const auto logs = evalkit::parse_pilot_csv(slurp(a->logs));
    std::cout << evalkit::format_pilot_table(evalkit::pilot_summary(logs));
    for (const auto& log : logs) {
      if (!log.reported_yield) continue;
      const double y = evalkit::session_yield(log.external_seeds, log.internal_seeds, log.pins);
      if (std::abs(y - *log.reported_yield) > 0.005) {
        std::cerr << "warning: participant " << log.participant << " reports yield "
                  << *log.reported_yield << " but pins/seeds gives " << y << "\n";
      }
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"obscurer: generative corpora and visual similarity retrieval"};
  app.require_subcommand(1);
  setup_gen(app);
  setup_filter(app);
  setup_index(app);
  setup_corpus(app);
  setup_serve(app);
  setup_eval(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
