#include "sbopt/tsplib.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace sbopt {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

ATSPInstance parse_atsp(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    std::map<std::string, std::string> header;
    bool in_weights = false;
    std::vector<double> weights;
    std::size_t weight_line = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (!in_weights) {
            if (t == "EDGE_WEIGHT_SECTION") {
                in_weights = true;
                weight_line = line_no;
                continue;
            }
            if (t == "EOF") break;
            const auto colon = t.find(':');
            if (colon == std::string::npos)
                throw TsplibParseError("expected 'KEY : VALUE' or a section keyword, got '" +
                                           t + "'",
                                       line_no);
            header[trim(t.substr(0, colon))] = trim(t.substr(colon + 1));
        } else {
            if (t == "EOF") break;
            std::istringstream ls(t);
            std::string tok;
            while (ls >> tok) {
                try {
                    std::size_t consumed = 0;
                    const double w = std::stod(tok, &consumed);
                    if (consumed != tok.size()) throw std::invalid_argument(tok);
                    weights.push_back(w);
                } catch (const std::exception&) {
                    throw TsplibParseError("non-numeric weight token '" + tok + "'", line_no);
                }
            }
        }
    }

    if (!header.count("DIMENSION"))
        throw TsplibParseError("missing DIMENSION header", line_no);
    long dim = 0;
    try {
        dim = std::stol(header.at("DIMENSION"));
    } catch (const std::exception&) {
        throw TsplibParseError("DIMENSION is not an integer", line_no);
    }
    if (dim <= 0) throw TsplibParseError("DIMENSION must be positive", line_no);

    if (header.count("TYPE") && header.at("TYPE") != "ATSP")
        throw TsplibParseError("unsupported TYPE '" + header.at("TYPE") + "' (only ATSP)",
                               line_no);
    if (header.count("EDGE_WEIGHT_TYPE") && header.at("EDGE_WEIGHT_TYPE") != "EXPLICIT")
        throw TsplibParseError("unsupported EDGE_WEIGHT_TYPE '" +
                                   header.at("EDGE_WEIGHT_TYPE") + "' (only EXPLICIT)",
                               line_no);
    if (header.count("EDGE_WEIGHT_FORMAT") && header.at("EDGE_WEIGHT_FORMAT") != "FULL_MATRIX")
        throw TsplibParseError("unsupported EDGE_WEIGHT_FORMAT '" +
                                   header.at("EDGE_WEIGHT_FORMAT") + "' (only FULL_MATRIX)",
                               line_no);
    if (!in_weights) throw TsplibParseError("missing EDGE_WEIGHT_SECTION", line_no);

    const std::size_t k = static_cast<std::size_t>(dim);
    if (weights.size() != k * k)
        throw TsplibParseError("expected " + std::to_string(k * k) + " weights, got " +
                                   std::to_string(weights.size()),
                               weight_line);

    ATSPInstance inst;
    inst.name = header.count("NAME") ? header.at("NAME") : "unnamed";
    inst.city_count = k;
    inst.distance.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) inst.distance[i][j] = weights[i * k + j];
    return inst;
}

ATSPInstance parse_atsp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("tsplib: cannot open file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_atsp(buf.str());
}

std::string serialize_atsp(const ATSPInstance& instance) {
    std::ostringstream out;
    out.precision(17);
    out << "NAME: " << instance.name << "\n"
        << "TYPE: ATSP\n"
        << "DIMENSION: " << instance.city_count << "\n"
        << "EDGE_WEIGHT_TYPE: EXPLICIT\n"
        << "EDGE_WEIGHT_FORMAT: FULL_MATRIX\n"
        << "EDGE_WEIGHT_SECTION\n";
    for (const auto& row : instance.distance) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
        out << "\n";
    }
    out << "EOF\n";
    return out.str();
}

}  // namespace sbopt
