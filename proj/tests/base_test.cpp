#include "hrs/base.hpp"

#include <gtest/gtest.h>

namespace hrs {
namespace {

TEST(Words, JoinSplitRoundTrip) {
  Word w{"X", "1", "2"};
  EXPECT_EQ(join(w), "X.1.2");
  EXPECT_EQ(split("X.1.2", '.'), w);
  EXPECT_EQ(join(Word{}), "");
  EXPECT_EQ(split("", '.'), Word{});
  EXPECT_EQ(split("solo", '.'), (Word{"solo"}));
}

TEST(Identifiers, DigitsAndUnderscoresAllowed) {
  EXPECT_TRUE(is_identifier("I"));
  EXPECT_TRUE(is_identifier("0"));
  EXPECT_TRUE(is_identifier("ray_3"));
  EXPECT_FALSE(is_identifier(""));
  EXPECT_FALSE(is_identifier("a.b"));
  EXPECT_FALSE(is_identifier("x y"));
  EXPECT_FALSE(is_identifier("e:v"));
}

TEST(Perms, ComposeAppliesRightFirst) {
  // f = (1 2) and g = (2 3) in one-line 0-based form.
  Perm f{1, 0, 2};
  Perm g{0, 2, 1};
  // (f o g)(i) = f(g(i)): 0 -> 0 -> 1, 1 -> 2 -> 2, 2 -> 1 -> 0.
  EXPECT_EQ(compose(f, g), (Perm{1, 2, 0}));
  EXPECT_EQ(compose(g, f), (Perm{2, 0, 1}));
}

TEST(Perms, InverseAndIdentity) {
  Perm p{2, 0, 1};
  EXPECT_EQ(compose(p, inverse(p)), identity_perm(3));
  EXPECT_EQ(compose(inverse(p), p), identity_perm(3));
  EXPECT_TRUE(is_identity(identity_perm(4)));
  EXPECT_FALSE(is_identity(p));
  EXPECT_TRUE(is_perm(p));
  EXPECT_FALSE(is_perm(Perm{0, 0, 1}));
  EXPECT_FALSE(is_perm(Perm{0, 3, 1}));
}

TEST(Perms, GenerateGroupClosure) {
  // <(1 2), (1 2 3)> = Sym(3).
  auto sym3 = generate_group({Perm{1, 0, 2}, Perm{1, 2, 0}}, 3);
  EXPECT_EQ(sym3.size(), 6u);
  // <(1 2 3)> = cyclic of order 3.
  auto c3 = generate_group({Perm{1, 2, 0}}, 3);
  EXPECT_EQ(c3.size(), 3u);
  // Empty generating set still contains the identity.
  auto triv = generate_group({}, 3);
  EXPECT_EQ(triv.size(), 1u);
  EXPECT_TRUE(triv.count(identity_perm(3)));
}

TEST(Perms, CycleStringOneBased) {
  EXPECT_EQ(cycle_string(identity_perm(3)), "id");
  EXPECT_EQ(cycle_string(Perm{1, 0, 2}), "(1 2)");
  EXPECT_EQ(cycle_string(Perm{1, 2, 0}), "(1 2 3)");
  EXPECT_EQ(cycle_string(Perm{1, 0, 3, 2}), "(1 2)(3 4)");
}

TEST(Diagnostics, AccumulatesErrors) {
  Diagnostics d;
  EXPECT_TRUE(d.ok());
  d.fail("first");
  d.fail("second");
  EXPECT_FALSE(d.ok());
  EXPECT_NE(d.str().find("first"), std::string::npos);
  EXPECT_NE(d.str().find("second"), std::string::npos);
}

}  // namespace
}  // namespace hrs
