#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mplr/model.hpp"

namespace mplr {

namespace {

constexpr const char* kMagic = "mplr-checkpoint 1";

std::size_t parse_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw std::runtime_error("checkpoint: bad value for " + key);
  return out;
}

}  // namespace

void save_checkpoint(std::ostream& out, const ModelParams& params, const std::map<std::string, std::string>& metadata) {
  const auto& c = params.config();
  out << kMagic << '\n'
      << "num_predicates " << c.num_predicates << '\n'
      << "embedding_dim " << c.embedding_dim << '\n'
      << "hidden_dim " << c.hidden_dim << '\n'
      << "rank " << c.rank << '\n'
      << "max_rule_len " << c.max_rule_len << '\n'
      << "normalization " << to_string(c.normalization) << '\n'
      << "epsilon_mode " << to_string(c.epsilon_mode) << '\n'
      << "seed " << c.seed << '\n';
  for (const auto& [k, v] : metadata) {
    if (k.empty() || k.find_first_of(" \t\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw std::invalid_argument("checkpoint metadata key/value not representable: " + k);
    }
    out << "meta " << k << ' ' << v << '\n';
  }
  out << "values " << params.size() << '\n' << std::hexfloat;
  for (double v : params.values()) out << v << '\n';
  out << std::defaultfloat << "end\n";
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const std::map<std::string, std::string>& metadata) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_checkpoint(f, params, metadata);
}

ModelParams load_checkpoint(std::istream& in, std::map<std::string, std::string>* metadata) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw std::runtime_error("checkpoint: missing header");
  ModelConfig c;
  std::size_t count = 0;
  bool have_values = false;
  while (std::getline(in, line)) {
    const auto sp = line.find(' ');
    const std::string key = line.substr(0, sp), value = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (key == "num_predicates") c.num_predicates = parse_size(key, value);
    else if (key == "embedding_dim") c.embedding_dim = parse_size(key, value);
    else if (key == "hidden_dim") c.hidden_dim = parse_size(key, value);
    else if (key == "rank") c.rank = parse_size(key, value);
    else if (key == "max_rule_len") c.max_rule_len = parse_size(key, value);
    else if (key == "normalization") c.normalization = parse_normalization(value);
    else if (key == "epsilon_mode") c.epsilon_mode = parse_epsilon_mode(value);
    else if (key == "seed") c.seed = parse_size(key, value);
    else if (key == "meta") {
      const auto sp2 = value.find(' ');
      if (metadata) (*metadata)[value.substr(0, sp2)] = sp2 == std::string::npos ? "" : value.substr(sp2 + 1);
    } else if (key == "values") {
      count = parse_size(key, value);
      have_values = true;
      break;
    } else {
      throw std::runtime_error("checkpoint: unknown field '" + key + "'");
    }
  }
  if (!have_values) throw std::runtime_error("checkpoint: missing values section");
  ModelParams params(c);
  if (params.size() != count) throw std::runtime_error("checkpoint: value count does not match the stored shapes");
  auto values = params.values();
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("checkpoint: truncated values");
    char* end = nullptr;
    values[i] = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0') throw std::runtime_error("checkpoint: bad value at index " + std::to_string(i));
  }
  if (!std::getline(in, line) || line != "end") throw std::runtime_error("checkpoint: missing end marker");
  return params;
}

ModelParams load_checkpoint(const std::filesystem::path& path, std::map<std::string, std::string>* metadata) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open checkpoint " + path.string());
  return load_checkpoint(f, metadata);
}

}  // namespace mplr
