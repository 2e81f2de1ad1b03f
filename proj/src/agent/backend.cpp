#include "competeai/backend.hpp"

namespace competeai {

std::string render_diagnostics(const std::vector<std::string>& problems)
{
    std::string out = "Your previous reply could not be used:\n";
    for (const auto& p : problems)
        out += "- " + p + "\n";
    out += "Please reply again in the required format.";
    return out;
}

} // namespace competeai
