#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace finprint {

constexpr const char* kToolVersion = "0.1.0";

// FNV-1a over file bytes; enough to tell whether two runs saw the same inputs.
inline std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (in.eof()) break;
    }
    return h;
}

// One manifest per pipeline stage: what ran, on what, producing what.
struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::vector<std::string> input_paths;
    std::vector<std::string> output_paths;
    std::uint64_t seed = 0;
    double duration_seconds = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json inputs = nlohmann::json::array();
        for (const auto& p : input_paths)
            inputs.push_back({{"path", p}, {"fnv1a", fnv1a_file(p)}});
        return {
            {"tool_version", kToolVersion},
            {"command", command},
            {"config", config},
            {"inputs", inputs},
            {"outputs", output_paths},
            {"seed", seed},
            {"duration_seconds", duration_seconds},
        };
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        out << to_json().dump(2) << '\n';
    }
};

class StageTimer {
public:
    StageTimer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace finprint
