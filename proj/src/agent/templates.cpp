#include "competeai/templates.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "templates_builtin.hpp"

namespace competeai {

namespace {

bool truthy(const nlohmann::json& v)
{
    if (v.is_null())
        return false;
    if (v.is_boolean())
        return v.get<bool>();
    if (v.is_string())
        return !v.get_ref<const std::string&>().empty();
    if (v.is_array() || v.is_object())
        return !v.empty();
    return true;
}

std::string as_text(const nlohmann::json& v)
{
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_null())
        return "";
    return v.dump();
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw TemplateError("cannot read template file " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(std::string s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
        ++i;
    return s.substr(i);
}

} // namespace

std::string render_template(const std::string& text, const nlohmann::json& vars, const std::string& label)
{
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find("{{", pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        out.append(text, pos, open - pos);
        const auto close = text.find("}}", open + 2);
        if (close == std::string::npos)
            throw TemplateError(label + ": unterminated placeholder");
        std::string tag = text.substr(open + 2, close - open - 2);
        pos = close + 2;

        if (!tag.empty() && tag[0] == '#') {
            const std::string name = tag.substr(1);
            const std::string end_tag = "{{/" + name + "}}";
            const auto end = text.find(end_tag, pos);
            if (end == std::string::npos)
                throw TemplateError(label + ": section '" + name + "' is not closed");
            if (!vars.contains(name))
                throw TemplateError(label + ": unbound section '" + name + "'");
            if (truthy(vars.at(name)))
                out += render_template(text.substr(pos, end - pos), vars, label);
            pos = end + end_tag.size();
            // a section on its own line leaves no blank line behind
            if (!truthy(vars.at(name)) && pos < text.size() && text[pos] == '\n' &&
                (out.empty() || out.back() == '\n'))
                ++pos;
            continue;
        }
        if (!tag.empty() && tag[0] == '/')
            throw TemplateError(label + ": stray section end '" + tag + "'");
        if (!vars.contains(tag))
            throw TemplateError(label + ": unbound placeholder '" + tag + "'");
        out += as_text(vars.at(tag));
    }
    return out;
}

TemplateSet::TemplateSet(std::string version, std::map<std::string, std::string> templates)
    : version_(std::move(version)), templates_(std::move(templates))
{
}

TemplateSet TemplateSet::builtin(const std::string& version)
{
    for (const auto& set : builtin_template_sets())
        if (set.version == version)
            return TemplateSet(set.version, set.templates);
    throw TemplateError("unknown template set '" + version + "'");
}

std::vector<std::string> TemplateSet::builtin_versions()
{
    std::vector<std::string> out;
    for (const auto& set : builtin_template_sets())
        out.push_back(set.version);
    return out;
}

TemplateSet TemplateSet::load_dir(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir))
        throw TemplateError("template directory not found: " + dir.string());
    const auto version_file = dir / "VERSION";
    if (!std::filesystem::exists(version_file))
        throw TemplateError("template directory has no VERSION file: " + dir.string());
    std::map<std::string, std::string> templates;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".txt")
            templates[entry.path().stem().string()] = read_file(entry.path());
    return TemplateSet(trim(read_file(version_file)), std::move(templates));
}

TemplateSet TemplateSet::resolve(const std::string& id_or_dir)
{
    for (const auto& v : builtin_versions())
        if (v == id_or_dir)
            return builtin(v);
    return load_dir(id_or_dir);
}

const std::string& TemplateSet::text(const std::string& name) const
{
    auto it = templates_.find(name);
    if (it == templates_.end())
        throw TemplateError("template set '" + version_ + "' has no template '" + name + "'");
    return it->second;
}

std::string TemplateSet::render(const std::string& name, const nlohmann::json& vars) const
{
    return render_template(text(name), vars, version_ + "/" + name);
}

std::vector<std::string> TemplateSet::placeholders(const std::string& name) const
{
    const auto& t = text(name);
    std::set<std::string> found;
    std::size_t pos = 0;
    while ((pos = t.find("{{", pos)) != std::string::npos) {
        const auto close = t.find("}}", pos);
        if (close == std::string::npos)
            break;
        std::string tag = t.substr(pos + 2, close - pos - 2);
        if (!tag.empty() && (tag[0] == '#' || tag[0] == '/'))
            tag = tag.substr(1);
        found.insert(tag);
        pos = close + 2;
    }
    return {found.begin(), found.end()};
}

const std::vector<std::string>& required_templates()
{
    static const std::vector<std::string> names{
        "restaurant_system", "restaurant_turn", "customer_system", "customer_choice", "group_system",
        "group_utterance",   "group_vote",      "customer_order",  "customer_review", "reason_classifier",
    };
    return names;
}

} // namespace competeai
