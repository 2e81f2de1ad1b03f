#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace competeai {

class TemplateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Named prompt templates sharing one version string.
///
/// Syntax: `{{name}}` substitutes a variable; `{{#name}}...{{/name}}` keeps
/// the enclosed text only when the variable is truthy (non-empty string or
/// array, true, or any number). Sections do not nest with the same name.
class TemplateSet {
public:
    TemplateSet() = default;
    TemplateSet(std::string version, std::map<std::string, std::string> templates);

    /// The set compiled into the binary, by version id ("v1").
    static TemplateSet builtin(const std::string& version);
    static std::vector<std::string> builtin_versions();
    /// Every *.txt file in `dir`; the version comes from `dir/VERSION`.
    static TemplateSet load_dir(const std::filesystem::path& dir);
    /// A builtin id, or else a directory path.
    static TemplateSet resolve(const std::string& id_or_dir);

    const std::string& version() const { return version_; }
    bool has(const std::string& name) const { return templates_.count(name) != 0; }
    const std::string& text(const std::string& name) const;

    /// Throws TemplateError for an unknown template or an unbound placeholder.
    std::string render(const std::string& name, const nlohmann::json& vars) const;

    /// Names of placeholders used by a template (variables and sections).
    std::vector<std::string> placeholders(const std::string& name) const;

private:
    std::string version_;
    std::map<std::string, std::string> templates_;
};

/// Templates every set must provide.
const std::vector<std::string>& required_templates();

std::string render_template(const std::string& text, const nlohmann::json& vars, const std::string& label = "template");

} // namespace competeai
