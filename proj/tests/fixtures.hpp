#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "mplr/kg.hpp"

namespace mplr::testing {

using NamedTriple = std::tuple<std::string, std::string, std::string>;

inline KnowledgeGraph make_kg(const std::vector<NamedTriple>& rows, const std::vector<std::string>& extra_entities = {}) {
  Vocabulary entities, predicates;
  std::vector<Triple> triples;
  for (const auto& [h, p, t] : rows) {
    const EntityId hi = entities.intern(h);
    const PredicateId pi = predicates.intern(p);
    triples.push_back({hi, pi, entities.intern(t)});
  }
  for (const auto& e : extra_entities) entities.intern(e);
  return KnowledgeGraph(std::move(entities), std::move(predicates), std::move(triples));
}

/// Family fragment with two grandsons x1, x2 and their relatives z1..z4.
/// The (z4, sisterOf, z4) loop makes M_sisterOf · M_daughterOf match the worked example.
inline KnowledgeGraph toy_kg() {
  return make_kg({
      {"z1", "daughterOf", "x1"},
      {"z2", "daughterOf", "x1"},
      {"z4", "daughterOf", "x2"},
      {"z1", "sisterOf", "z2"},
      {"z1", "sisterOf", "z4"},
      {"z2", "sisterOf", "z1"},
      {"z2", "sisterOf", "z4"},
      {"z4", "sisterOf", "z1"},
      {"z4", "sisterOf", "z4"},
      {"z3", "sonOf", "x1"},
      {"x2", "auntOf", "z2"},
      {"x2", "auntOf", "z3"},
  });
}

/// Random multigraph: every (h, p, t) is present independently with probability `density`.
/// Self-loops are allowed. Entity and predicate names are e<i> and p<k>.
inline KnowledgeGraph random_kg(std::uint64_t seed, std::size_t entities, std::size_t predicates, double density) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(density);
  Vocabulary ev, pv;
  for (std::size_t i = 0; i < entities; ++i) ev.intern("e" + std::to_string(i));
  for (std::size_t k = 0; k < predicates; ++k) pv.intern("p" + std::to_string(k));
  std::vector<Triple> triples;
  for (EntityId h = 0; h < entities; ++h) {
    for (PredicateId p = 0; p < predicates; ++p) {
      for (EntityId t = 0; t < entities; ++t) {
        if (coin(rng)) triples.push_back({h, p, t});
      }
    }
  }
  return KnowledgeGraph(std::move(ev), std::move(pv), std::move(triples));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("mplr-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// The toy KG as a TAB-separated triple file.
inline std::string toy_triples_text() {
  const KnowledgeGraph kg = toy_kg();
  std::string out;
  for (const auto& t : kg.triples()) {
    out += kg.entities().name(t.head) + "\t" + kg.predicates().name(t.predicate) + "\t" +
           kg.entities().name(t.tail) + "\n";
  }
  return out;
}

}  // namespace mplr::testing
