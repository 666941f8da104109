#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gazescreen/core.hpp"

namespace testsupport {

// Unique scratch directory, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("gazescreen_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline gazescreen::GazeRecording make_recording(const std::vector<gazescreen::GazeSample>& samples,
                                                std::string subject = "s0") {
    gazescreen::GazeRecording rec;
    rec.subject_id = std::move(subject);
    rec.stimulus_id = "stim";
    rec.samples = samples;
    return rec;
}

// Uniform recording at the given rate with all samples at one point.
inline gazescreen::GazeRecording stationary_recording(std::size_t n, double x, double y,
                                                      double period_ms = 16.7) {
    std::vector<gazescreen::GazeSample> samples;
    for (std::size_t i = 0; i < n; ++i) {
        samples.push_back({static_cast<double>(i) * period_ms, x, y, true});
    }
    return make_recording(samples);
}

// Random valid recording; test-side generator, independent of the library's
// RNG streams.
inline gazescreen::GazeRecording random_recording(std::mt19937_64& gen, std::size_t max_samples,
                                                  double invalid_prob = 0.0) {
    std::uniform_int_distribution<std::size_t> n_dist(2, max_samples);
    std::uniform_real_distribution<double> coord(0.0, 1.0);
    std::uniform_real_distribution<double> dt(1.0, 40.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<gazescreen::GazeSample> samples;
    const std::size_t n = n_dist(gen);
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        samples.push_back({t, coord(gen), coord(gen), u(gen) >= invalid_prob});
        t += dt(gen);
    }
    return make_recording(samples);
}

}  // namespace testsupport
