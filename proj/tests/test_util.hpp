// Shared helpers for the unit tests: error capture, temporary files, and
// deterministic random fields.

#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "nsv/error.hpp"
#include "nsv/fields.hpp"
#include "nsv/geometry.hpp"

namespace test_util {

struct Caught {
    bool threw = false;
    nsv::ErrorKind kind = nsv::ErrorKind::config;
    std::string msg;
};

// Runs f and records the SimError it throws (if any).
template <class F>
Caught capture(F&& f) {
    Caught c;
    try {
        f();
    } catch (const nsv::SimError& e) {
        c.threw = true;
        c.kind = e.kind();
        c.msg = e.what();
    }
    return c;
}

inline bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

// Unique scratch directory under the system temp root; removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("nsv_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

// Deterministic uniform field in [lo, hi].
inline nsv::ScalarField random_scalar_field(std::size_t cells, unsigned seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    nsv::ScalarField f(cells);
    for (double& v : f) v = dist(rng);
    return f;
}

template <int D>
nsv::FaceField<D> random_face_field(const nsv::Grid<D>& g, unsigned seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    nsv::FaceField<D> u(g);
    for (int a = 0; a < D; ++a)
        for (double& v : u[a]) v = dist(rng);
    return u;
}

}  // namespace test_util
