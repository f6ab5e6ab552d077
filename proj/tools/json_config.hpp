#pragma once

#include <CLI11.hpp>
#include <json.hpp>
#include <string>
#include <vector>

namespace cftlab::tools {

// JSON config files for CLI11: top-level keys are options of the main
// command, nested objects belong to the subcommand of that name. A manifest
// is accepted too; its "config" object is used.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    if (j.is_object() && j.contains("config") && j.at("config").is_object()) j = j.at("config");
    if (!j.is_object()) throw CLI::ConversionError("config: expected a JSON object");
    std::vector<CLI::ConfigItem> out;
    collect(j, {}, out);
    return out;
  }

  // Resolved values of every option (defaults included) and of the
  // subcommands that ran.
  static nlohmann::json dump(const CLI::App* app, bool default_also) {
    nlohmann::json j = nlohmann::json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames()[0];
      if (name == "help" || name == "config") continue;
      if (opt->get_type_size() == 0) {
        if (opt->count() > 0 || default_also) j[name] = opt->count() > 0;
      } else if (opt->count() == 1 && opt->results().size() == 1) {
        j[name] = opt->results().front();
      } else if (opt->count() > 0) {
        j[name] = opt->results();
      } else if (default_also && !opt->get_default_str().empty()) {
        const std::string d = opt->get_default_str();
        if (d.front() != '[' && d.front() != '{') {
          j[name] = d;
        } else if (auto list = nlohmann::json::parse(d, nullptr, false); list.is_array() && !list.empty()) {
          j[name] = list;
        }
      }
    }
    for (const CLI::App* sub : app->get_subcommands({}))
      if (sub->count() > 0) j[sub->get_name()] = dump(sub, default_also);
    return j;
  }

 private:
  static void collect(const nlohmann::json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        auto p = parents;
        p.push_back(it.key());
        collect(*it, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      auto text = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
      if (it->is_array()) {
        for (const auto& v : *it) item.inputs.push_back(text(v));
      } else {
        item.inputs.push_back(text(*it));
      }
      out.push_back(std::move(item));
    }
  }
};

}  // namespace cftlab::tools
