#include "common.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace lspcm {

namespace {
std::atomic<long> g_warnings{0};
std::mutex g_warn_mutex;
}  // namespace

void warn(const std::string& message) {
    ++g_warnings;
    static const bool quiet = std::getenv("LSPCM_QUIET") != nullptr;
    if (quiet) return;
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    std::cerr << "lspcm: warning: " << message << '\n';
}

long warning_count() { return g_warnings.load(); }

}  // namespace lspcm
