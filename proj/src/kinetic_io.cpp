#include <cstring>

#include "nsv/error.hpp"
#include "nsv/io_util.hpp"
#include "nsv/kinetic.hpp"

namespace nsv {

namespace {
constexpr char kMagic[4] = {'N', 'S', 'V', 'P'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_snapshot_bytes(const std::string& path, const std::vector<double>& payload, std::uint64_t count) {
    std::string buf;
    buf.resize(16 + payload.size() * sizeof(double));
    char* p = buf.data();
    std::memcpy(p, kMagic, 4);
    std::memcpy(p + 4, &kVersion, 4);
    std::memcpy(p + 8, &count, 8);
    if (!payload.empty()) std::memcpy(p + 16, payload.data(), payload.size() * sizeof(double));
    atomic_write_file(path, buf);
}

std::vector<double> read_snapshot_bytes(const std::string& path, std::uint64_t& count_out) {
    const std::string buf = read_file(path);
    if (buf.size() < 16 || std::memcmp(buf.data(), kMagic, 4) != 0)
        fail_io("file " + path + " is not a particle snapshot (bad magic)");
    std::uint32_t version = 0;
    std::memcpy(&version, buf.data() + 4, 4);
    if (version != kVersion) fail_io("snapshot " + path + " has unsupported version " + std::to_string(version));
    std::memcpy(&count_out, buf.data() + 8, 8);
    const std::size_t bytes = buf.size() - 16;
    if (bytes % sizeof(double) != 0) fail_io("snapshot " + path + " is truncated");
    std::vector<double> payload(bytes / sizeof(double));
    if (!payload.empty()) std::memcpy(payload.data(), buf.data() + 16, bytes);
    return payload;
}

}  // namespace nsv
