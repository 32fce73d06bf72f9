#include <gtest/gtest.h>

#include <sstream>

#include "gfrag/area_ensemble.hpp"
#include "gfrag/key_value.hpp"
#include "reference_model.hpp"

namespace gfrag {
namespace {

TEST(AreaEnsemble, RoundTripIsExact) {
    const TreeModels models(find_cramer_roots(testing::reference_triplet()), PathConfig{});
    TruncationPolicy policy;
    policy.mass_floor = 0.02;
    const AreaEnsemble e = sample_area_ensemble(models, TreeLaw::QMinus, 0.5, 50, policy, 120, 2);
    std::stringstream text;
    write_area_ensemble(text, e);
    const AreaEnsemble back = read_area_ensemble(text);
    EXPECT_EQ(back.law, TreeLaw::QMinus);
    EXPECT_EQ(back.x, 0.5);
    EXPECT_EQ(back.seed, 120u);
    EXPECT_EQ(back.areas, e.areas);
    EXPECT_EQ(back.minus, e.minus);
    EXPECT_EQ(back.partial, e.partial);

    // Same seed, same trees.
    const AreaEnsemble again = sample_area_ensemble(models, TreeLaw::QMinus, 0.5, 50, policy, 120, 2, 3);
    EXPECT_EQ(again.areas, e.areas);
}

TEST(AreaEnsemble, MalformedRowNamesItsLine) {
    std::istringstream in(
        "# law = P\n# x = 1\n# seed = 1\n# mass_floor = 0.001\n# max_generation = 8\n# count = 2\n"
        "# columns = area partial\n1.5 0\nabc 0\n");
    try {
        read_area_ensemble(in, "bad.txt");
        FAIL() << "expected a ConfigError";
    } catch (const ConfigError& err) {
        EXPECT_NE(std::string(err.what()).find("bad.txt:9"), std::string::npos) << err.what();
    }
    std::istringstream short_file("# law = P\n# x = 1\n# seed = 1\n# mass_floor = 0.001\n# max_generation = 8\n"
                                  "# count = 3\n# columns = area partial\n1.5 0\n");
    EXPECT_THROW(read_area_ensemble(short_file), ConfigError);
}

}  // namespace
}  // namespace gfrag
