#include "iskew/model_json.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace iskew {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ModelParseError("unknown key '" + key + "' in " + where);
    }
  }
}

double number_at(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ModelParseError("missing key '" + key + "' in " + where);
  if (!it->is_number()) throw ModelParseError("key '" + key + "' in " + where + " must be a number");
  return it->get<double>();
}

}  // namespace

IndexModel parse_model(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ModelParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ModelParseError("model document must be a JSON object");
  reject_unknown_keys(doc, {"mode", "components", "correlation"}, "model");

  IndexModel model;
  const auto mode = doc.find("mode");
  if (mode == doc.end()) throw ModelParseError("missing key 'mode' in model");
  if (*mode == "one_factor") {
    model.mode = FactorMode::OneFactor;
  } else if (*mode == "two_factor") {
    model.mode = FactorMode::TwoFactor;
  } else {
    throw ModelParseError("key 'mode' must be \"one_factor\" or \"two_factor\"");
  }

  const auto comps = doc.find("components");
  if (comps == doc.end()) throw ModelParseError("missing key 'components' in model");
  if (!comps->is_array() || comps->empty()) {
    throw ModelParseError("key 'components' must be a non-empty array");
  }
  for (std::size_t i = 0; i < comps->size(); ++i) {
    const auto& c = (*comps)[i];
    const std::string where = "components[" + std::to_string(i) + "]";
    if (!c.is_object()) throw ModelParseError(where + " must be an object");
    reject_unknown_keys(c, {"weight", "sigma", "eta", "hurst"}, where);
    Component comp;
    comp.weight = number_at(c, "weight", where);
    comp.vol.sigma = number_at(c, "sigma", where);
    comp.vol.eta = number_at(c, "eta", where);
    const double h = number_at(c, "hurst", where);
    try {
      comp.hurst = HurstParam(h);
    } catch (const std::invalid_argument& e) {
      throw ModelParseError("key 'hurst' in " + where + ": " + e.what());
    }
    model.components.push_back(comp);
  }

  const auto corr = doc.find("correlation");
  if (corr == doc.end()) throw ModelParseError("missing key 'correlation' in model");
  if (!corr->is_array() || corr->empty()) {
    throw ModelParseError("key 'correlation' must be a non-empty array of rows");
  }
  std::vector<std::vector<double>> rows;
  for (const auto& row : *corr) {
    if (!row.is_array()) throw ModelParseError("key 'correlation' must be an array of rows");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw ModelParseError("key 'correlation' entries must be numbers");
      r.push_back(v.get<double>());
    }
    if (r.size() != corr->size()) throw ModelParseError("key 'correlation' must be a square matrix");
    rows.push_back(std::move(r));
  }
  model.correlation = CorrelationMatrix(std::move(rows));
  return model;
}

IndexModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelParseError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string to_json(const IndexModel& model) {
  json doc;
  doc["mode"] = model.mode == FactorMode::TwoFactor ? "two_factor" : "one_factor";
  doc["components"] = json::array();
  for (const auto& c : model.components) {
    doc["components"].push_back(
        {{"weight", c.weight}, {"sigma", c.vol.sigma}, {"eta", c.vol.eta}, {"hurst", c.hurst.value()}});
  }
  json rows = json::array();
  for (std::size_t i = 0; i < model.correlation.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < model.correlation.size(); ++j) row.push_back(model.correlation(i, j));
    rows.push_back(row);
  }
  doc["correlation"] = rows;
  return doc.dump(2);
}

}  // namespace iskew
