#include "icm/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace icm::io {
namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::Parse, what); }

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    parse_error(std::string("malformed JSON: ") + e.what());
  }
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) parse_error(where + " must be an object");
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto key : allowed) known = known || item.key() == key;
    if (!known) parse_error("unknown key '" + item.key() + "' in " + where);
  }
}

const json& field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) parse_error("missing key '" + std::string(key) + "' in " + where);
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) parse_error(where + " must be a number");
  return j.get<double>();
}

std::size_t index(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    parse_error(where + " must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) parse_error(where + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(number(v, where + " entry"));
  return out;
}

}  // namespace

FamilyFile parse_family(const std::string& json_text) {
  const json root = parse_json(json_text);
  require_object(root, "family file");
  reject_unknown_keys(root, {"space_size", "truth", "models"}, "family file");
  const std::size_t m = index(field(root, "space_size", "family file"), "space_size");
  if (m == 0) parse_error("space_size must be positive");

  const json& models = field(root, "models", "family file");
  if (!models.is_array() || models.empty()) parse_error("models must be a nonempty array");
  std::vector<std::vector<double>> masses;
  std::vector<double> priors;
  std::vector<std::string> ids;
  for (std::size_t j = 0; j < models.size(); ++j) {
    const std::string where = "model " + std::to_string(j);
    const json& entry = models[j];
    require_object(entry, where);
    reject_unknown_keys(entry, {"id", "prior", "probs"}, where);
    const json& id = field(entry, "id", where);
    if (!id.is_string()) parse_error(where + " id must be a string");
    ids.push_back(id.get<std::string>());
    priors.push_back(number(field(entry, "prior", where), where + " prior"));
    masses.push_back(numbers(field(entry, "probs", where), where + " probs"));
    if (masses.back().size() != m) {
      throw Error(ErrorKind::ShapeMismatch, where + " has " + std::to_string(masses.back().size()) +
                                                " probabilities, expected " + std::to_string(m));
    }
  }
  if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size()) {
    parse_error("model ids must be unique");
  }

  FamilyFile out{validate_family(masses, priors, ids), std::nullopt};
  if (auto it = root.find("truth"); it != root.end()) {
    auto truth = numbers(*it, "truth");
    if (truth.size() != m) throw Error(ErrorKind::ShapeMismatch, "truth has the wrong length");
    out.truth = Density::from_masses(std::move(truth));
  }
  return out;
}

FamilyFile read_family(const std::filesystem::path& path) { return parse_family(read_text(path)); }

Dataset parse_dataset(const std::string& json_text, std::size_t space_size) {
  const json root = parse_json(json_text);
  require_object(root, "dataset file");
  reject_unknown_keys(root, {"samples"}, "dataset file");
  const json& samples = field(root, "samples", "dataset file");
  if (!samples.is_array()) parse_error("samples must be an array");
  std::vector<std::size_t> xs;
  for (const auto& v : samples) xs.push_back(index(v, "sample"));
  return Dataset(std::move(xs), space_size);
}

Dataset read_dataset(const std::filesystem::path& path, std::size_t space_size) {
  return parse_dataset(read_text(path), space_size);
}

FamilyCover parse_cover(const std::string& json_text, const ModelFamily& family) {
  const json root = parse_json(json_text);
  require_object(root, "cover file");
  reject_unknown_keys(root, {"blocks"}, "cover file");
  const json& blocks = field(root, "blocks", "cover file");
  if (!blocks.is_array()) parse_error("blocks must be an array");
  std::vector<Block> out;
  std::vector<int> uses(family.size(), 0);
  for (const auto& b : blocks) {
    if (!b.is_array()) parse_error("each block must be an array");
    Block block;
    for (const auto& member : b) {
      std::size_t j;
      if (member.is_string()) {
        auto found = family.index_of(member.get<std::string>());
        if (!found) throw Error(ErrorKind::InvalidCover, "unknown model id '" + member.get<std::string>() + "'");
        j = *found;
      } else {
        j = index(member, "block member");
        if (j >= family.size()) throw Error(ErrorKind::IndexOutOfRange, "block member out of range");
      }
      block.push_back(j);
      ++uses[j];
    }
    out.push_back(std::move(block));
  }
  bool disjoint = true;
  for (int u : uses) disjoint = disjoint && u <= 1;
  return FamilyCover(std::move(out), family.size(), disjoint);
}

FamilyCover read_cover(const std::filesystem::path& path, const ModelFamily& family) {
  return parse_cover(read_text(path), family);
}

ParameterGrid parse_grid(const std::string& json_text) {
  static const std::set<std::string> kKnown{"lambda", "rho", "gamma", "alpha",
                                            "beta",   "n",   "t",     "delta"};
  const json root = parse_json(json_text);
  require_object(root, "grid file");
  ParameterGrid grid;
  for (const auto& item : root.items()) {
    if (!kKnown.count(item.key())) parse_error("unknown grid parameter '" + item.key() + "'");
    grid[item.key()] = numbers(item.value(), "grid parameter " + item.key());
  }
  return grid;
}

ParameterGrid read_grid(const std::filesystem::path& path) { return parse_grid(read_text(path)); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace icm::io
