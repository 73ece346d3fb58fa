#include "probeflow/json_format.hpp"

#include <charconv>
#include <cmath>

namespace probeflow {

namespace {

void write_string(std::string& out, const std::string& s) {
    // nlohmann produces a correctly escaped literal for a lone string.
    out += Json(s).dump(-1, ' ', false, Json::error_handler_t::strict);
}

void write_value(std::string& out, const Json& value, int depth) {
    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
    switch (value.type()) {
        case Json::value_t::object: {
            if (value.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = value.begin(); it != value.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += inner;
                write_string(out, it.key());
                out += ": ";
                write_value(out, it.value(), depth + 1);
            }
            out += "\n" + indent + "}";
            return;
        }
        case Json::value_t::array: {
            if (value.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& item : value) {
                if (!first) out += ",\n";
                first = false;
                out += inner;
                write_value(out, item, depth + 1);
            }
            out += "\n" + indent + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double x = value.get<double>();
            if (!std::isfinite(x)) {
                out += "null";
                return;
            }
            std::string text = format_double(x);
            if (text.find_first_of(".eE") == std::string::npos) text += ".0";
            out += text;
            return;
        }
        case Json::value_t::string:
            write_string(out, value.get<std::string>());
            return;
        default:
            out += value.dump();
            return;
    }
}

}  // namespace

std::string dump_canonical(const Json& value) {
    std::string out;
    write_value(out, value, 0);
    out += "\n";
    return out;
}

std::string format_double(double value, int significant_digits) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value,
                                      std::chars_format::general, significant_digits);
    return std::string(buffer, result.ptr);
}

}  // namespace probeflow
