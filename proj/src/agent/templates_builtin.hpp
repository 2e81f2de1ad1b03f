#pragma once

#include <map>
#include <string>
#include <vector>

namespace competeai {

struct BuiltinTemplateSet {
    std::string version;
    std::map<std::string, std::string> templates;
};

const std::vector<BuiltinTemplateSet>& builtin_template_sets();

} // namespace competeai
