#include <gtest/gtest.h>

#include <cstdint>
#include <string>

#include "apu/scenario/output.hpp"
#include "apu/scenario/scenario.hpp"

using namespace apu::scenario;

namespace {

struct Golden {
    const char* preset;
    std::uint64_t fast;  ///< 0: no fast track
    std::uint64_t slow;
};

// Recorded on x86-64 Linux, GCC, glibc libm. A change here means preset
// output moved; rerun and review before updating.
constexpr Golden kGolden[] = {
    {"design", 0x045aad06290a7c44ULL, 0xaee2637cdedf3665ULL},
    {"fuel-step", 0, 0x37407d27739c060cULL},
    {"joint-fault", 0x96a260fbf0c13a72ULL, 0x411287765f00d3e1ULL},
};

}  // namespace

class PresetReplay : public ::testing::TestWithParam<Golden> {};

TEST_P(PresetReplay, CsvHashesMatch) {
    const Golden g = GetParam();
    const Scenario s = preset(g.preset);
    const Tracks t = selected(s, run(s));
    if (g.fast != 0) {
        EXPECT_EQ(fnv1a(csv_text(t.fast)), g.fast);
    } else {
        EXPECT_EQ(t.fast.width(), 0u);
    }
    EXPECT_EQ(fnv1a(csv_text(t.slow)), g.slow);
}

INSTANTIATE_TEST_SUITE_P(Presets, PresetReplay, ::testing::ValuesIn(kGolden),
                         [](const auto& info) {
                             std::string n = info.param.preset;
                             for (char& c : n)
                                 if (c == '-') c = '_';
                             return n;
                         });
