#include "seedo/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include <json.hpp>

namespace seedo {
namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& scope) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, "'" + scope + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw Error(ErrorKind::ConfigError, "unknown config key '" + scope + key + "'");
  }
}

}  // namespace

SelectionParams SelectionOverrides::resolve(const SpeedSeries& raw) const {
  SelectionParams p = SelectionParams::defaults_for(raw);
  if (smooth_window) p.smooth_window = *smooth_window;
  if (min_prominence) p.min_prominence = *min_prominence;
  if (min_separation) p.min_separation = *min_separation;
  if (edge_policy) p.edge_policy = *edge_policy;
  p.validate();
  return p;
}

void Config::validate() const {
  if (parallelism < 1) throw Error(ErrorKind::ConfigError, "parallelism must be >= 1");
  if (min_confidence < 0 || min_confidence > 1) throw Error(ErrorKind::ConfigError, "min_confidence outside [0, 1]");
  if (retry.max_retries < 0) throw Error(ErrorKind::ConfigError, "max_retries must be >= 0");
  if (selection.smooth_window && (*selection.smooth_window < 1 || *selection.smooth_window % 2 == 0)) {
    throw Error(ErrorKind::ConfigError, "smooth_window must be an odd integer >= 1");
  }
  if (selection.min_prominence && *selection.min_prominence < 0) {
    throw Error(ErrorKind::ConfigError, "min_prominence must be >= 0");
  }
  if (selection.min_separation && *selection.min_separation < 1) {
    throw Error(ErrorKind::ConfigError, "min_separation must be >= 1");
  }
  overlay.validate();
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read config " + path.string());
  Config c;
  try {
    const auto j = nlohmann::json::parse(in);
    reject_unknown(j,
                   {"endpoint", "model_name", "api_key_env", "fixtures_dir", "selection", "overlay", "min_confidence",
                    "retry", "parallelism"},
                   "");
    c.endpoint = j.value("endpoint", c.endpoint);
    c.model_name = j.value("model_name", c.model_name);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    if (j.contains("fixtures_dir")) {
      std::filesystem::path dir = j.at("fixtures_dir").get<std::string>();
      c.fixtures_dir = dir.is_absolute() ? dir : path.parent_path() / dir;
    }
    if (j.contains("selection")) {
      const auto& s = j.at("selection");
      reject_unknown(s, {"smooth_window", "min_prominence", "min_separation", "edge_policy"}, "selection.");
      if (s.contains("smooth_window")) c.selection.smooth_window = s.at("smooth_window").get<int>();
      if (s.contains("min_prominence")) c.selection.min_prominence = s.at("min_prominence").get<double>();
      if (s.contains("min_separation")) c.selection.min_separation = s.at("min_separation").get<int>();
      if (s.contains("edge_policy")) {
        const auto e = s.at("edge_policy").get<std::string>();
        if (e != "include-ends" && e != "exclude-ends") throw Error(ErrorKind::ConfigError, "bad edge_policy '" + e + "'");
        c.selection.edge_policy = e == "include-ends" ? EdgePolicy::IncludeEnds : EdgePolicy::ExcludeEnds;
      }
    }
    if (j.contains("overlay")) {
      const auto& o = j.at("overlay");
      reject_unknown(o, {"stroke_width", "font_size", "label_offset", "palette"}, "overlay.");
      c.overlay.stroke_width = o.value("stroke_width", c.overlay.stroke_width);
      c.overlay.font_size = o.value("font_size", c.overlay.font_size);
      if (o.contains("label_offset")) {
        c.overlay.label_offset = {o.at("label_offset").at(0).get<int>(), o.at("label_offset").at(1).get<int>()};
      }
      if (o.contains("palette")) {
        c.overlay.palette.clear();
        for (const auto& rgb : o.at("palette")) {
          c.overlay.palette.push_back(
              {rgb.at(0).get<std::uint8_t>(), rgb.at(1).get<std::uint8_t>(), rgb.at(2).get<std::uint8_t>()});
        }
      }
    }
    c.min_confidence = j.value("min_confidence", c.min_confidence);
    if (j.contains("retry")) {
      const auto& r = j.at("retry");
      reject_unknown(r, {"max_retries", "backoff_ms", "multiplier"}, "retry.");
      c.retry.max_retries = r.value("max_retries", c.retry.max_retries);
      c.retry.backoff = std::chrono::milliseconds(r.value("backoff_ms", static_cast<long>(c.retry.backoff.count())));
      c.retry.multiplier = r.value("multiplier", c.retry.multiplier);
    }
    c.parallelism = j.value("parallelism", c.parallelism);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str()); v && *v) return std::string(v);
  return std::nullopt;
}

std::unique_ptr<ChatClient> make_chat_client(const Config& config, const EnvLookup& env) {
  if (config.fixtures_dir) return std::make_unique<ScriptedClient>(*config.fixtures_dir);
  const auto key = env(config.api_key_env);
  if (!key) {
    throw Error(ErrorKind::ConfigError,
                "no fixtures directory configured and $" + config.api_key_env + " is not set");
  }
  return std::make_unique<HttpChatClient>(HttpClientOptions{config.endpoint, *key, std::chrono::seconds(120), config.retry});
}

}  // namespace seedo
