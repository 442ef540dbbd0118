#include "pushrec/trial_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace pushrec::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

void apply_meta(Trial& trial, const std::string& key, const std::string& value) {
    if (key == "id") {
        trial.id = value;
    } else if (key == "mass_kg") {
        trial.mass = parse_double(value, 0);
    } else if (key == "strategy") {
        trial.strategy = strategy_from_string(value);
    } else if (key == "start_mode") {
        trial.start_mode = start_mode_from_string(value);
    } else if (key == "abandoned") {
        if (value != "true" && value != "false")
            throw MalformedCsv("abandoned must be true or false, got '" + value + "'");
        trial.abandoned = (value == "true");
    } else if (key == "pre_shift_start_m") {
        trial.pre_shift_start = parse_double(value, 0);
    }
    // Unknown keys are ignored so files can carry extra provenance.
}

void apply_sidecar(Trial& trial, const std::filesystem::path& meta_path) {
    std::ifstream in(meta_path);
    if (!in) throw MalformedCsv("cannot open sidecar " + meta_path.string());
    nlohmann::json j;
    in >> j;
    if (j.contains("id")) trial.id = j["id"].get<std::string>();
    if (j.contains("mass_kg")) trial.mass = j["mass_kg"].get<double>();
    if (j.contains("strategy")) trial.strategy = strategy_from_string(j["strategy"].get<std::string>());
    if (j.contains("start_mode")) trial.start_mode = start_mode_from_string(j["start_mode"].get<std::string>());
    if (j.contains("abandoned")) trial.abandoned = j["abandoned"].get<bool>();
    if (j.contains("pre_shift_start_m")) trial.pre_shift_start = j["pre_shift_start_m"].get<double>();
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, Index line_no) {
    const std::string f = trim(field);
    double value = 0.0;
    const char* begin = f.data();
    const char* end = begin + f.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end)
        throw MalformedCsv("unparseable number '" + f + "' at line " + std::to_string(line_no));
    if (!std::isfinite(value))
        throw NonFiniteValue("non-finite number '" + f + "' at line " + std::to_string(line_no));
    return value;
}

Trial load_trial(const std::filesystem::path& path,
                 const std::optional<std::filesystem::path>& meta) {
    std::ifstream in(path);
    if (!in) throw MalformedCsv("cannot open " + path.string());

    Trial trial;
    trial.id = path.stem().string();

    std::string line;
    Index line_no = 0;
    std::vector<std::string> header;
    // metadata + header
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const auto eq = t.find('=');
            if (eq != std::string::npos)
                apply_meta(trial, trim(t.substr(1, eq - 1)), trim(t.substr(eq + 1)));
            continue;
        }
        header = split(t, ',');
        break;
    }
    if (header.empty()) throw MalformedCsv(path.string() + ": missing header row");
    for (auto& h : header) h = trim(h);
    if (header.size() < 2 || header.size() > 4 || header[0] != "time_s" ||
        header[1] != "position_m" ||
        (header.size() >= 3 && header[2] != "velocity_mps") ||
        (header.size() == 4 && header[3] != "acceleration_mps2"))
        throw MalformedCsv(path.string() + ": unexpected header '" + trim(line) + "'");

    const std::size_t ncols = header.size();
    std::vector<std::vector<double>> cols(ncols);
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto fields = split(t, ',');
        if (fields.size() != ncols)
            throw MalformedCsv(path.string() + ": expected " + std::to_string(ncols) +
                               " fields at line " + std::to_string(line_no) + ", got " +
                               std::to_string(fields.size()));
        for (std::size_t c = 0; c < ncols; ++c) cols[c].push_back(parse_double(fields[c], line_no));
    }

    const auto to_vector = [](const std::vector<double>& v) {
        return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())).eval();
    };
    trial.time = to_vector(cols[0]);
    trial.position = to_vector(cols[1]);
    if (ncols >= 3) trial.velocity = to_vector(cols[2]);
    if (ncols == 4) trial.acceleration = to_vector(cols[3]);

    if (meta) apply_sidecar(trial, *meta);
    validate(trial);
    return trial;
}

void save_trial(const Trial& trial, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // LF newlines on every platform
    if (!out) throw Error("cannot write " + path.string());

    out << "#id=" << trial.id << "\n";
    out << "#mass_kg=" << format_double(trial.mass) << "\n";
    if (trial.strategy) out << "#strategy=" << to_string(*trial.strategy) << "\n";
    out << "#start_mode=" << to_string(trial.start_mode) << "\n";
    out << "#abandoned=" << (trial.abandoned ? "true" : "false") << "\n";
    if (trial.pre_shift_start)
        out << "#pre_shift_start_m=" << format_double(*trial.pre_shift_start) << "\n";

    out << "time_s,position_m";
    if (trial.has_velocity()) out << ",velocity_mps";
    if (trial.has_acceleration()) out << ",acceleration_mps2";
    out << "\n";

    for (Index i = 0; i < trial.length(); ++i) {
        out << format_double(trial.time(i)) << ',' << format_double(trial.position(i));
        if (trial.has_velocity()) out << ',' << format_double(trial.velocity(i));
        if (trial.has_acceleration()) out << ',' << format_double(trial.acceleration(i));
        out << '\n';
    }
}

TreadmillLog load_treadmill(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MalformedCsv("cannot open " + path.string());

    std::string line;
    Index line_no = 0;
    bool header_seen = false;
    std::vector<double> time, speed;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            if (t != "time_s,speed_mps")
                throw MalformedCsv(path.string() + ": unexpected treadmill header '" + t + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split(t, ',');
        if (fields.size() != 2)
            throw MalformedCsv(path.string() + ": expected 2 fields at line " +
                               std::to_string(line_no));
        time.push_back(parse_double(fields[0], line_no));
        speed.push_back(parse_double(fields[1], line_no));
    }
    TreadmillLog log;
    log.time = Eigen::Map<const Vector>(time.data(), static_cast<Index>(time.size()));
    log.speed = Eigen::Map<const Vector>(speed.data(), static_cast<Index>(speed.size()));
    validate(log);
    return log;
}

void save_treadmill(const TreadmillLog& log, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "time_s,speed_mps\n";
    for (Index i = 0; i < log.time.size(); ++i)
        out << format_double(log.time(i)) << ',' << format_double(log.speed(i)) << '\n';
}

}  // namespace pushrec::io
