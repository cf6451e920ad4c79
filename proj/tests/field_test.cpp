// Copyright 2026 The Staircase-PIR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spir/field.hpp"

#include <cstdint>

#include "gtest/gtest.h"

namespace spir {
namespace {

TEST(PrimeFieldTest, AcceptsPrimes) {
  EXPECT_EQ(PrimeField(5).modulus(), 5U);
  EXPECT_EQ(PrimeField(2).modulus(), 2U);
  EXPECT_EQ(PrimeField(257).modulus(), 257U);
}

TEST(PrimeFieldTest, RejectsComposites) {
  for (std::uint64_t q : {0ULL, 1ULL, 4ULL, 9ULL, 91ULL, 256ULL, 65537ULL * 3}) {
    try {
      PrimeField f(q);
      FAIL() << q << " accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNotPrime) << q;
    }
  }
}

TEST(FieldElementTest, SmallArithmeticInGf5) {
  const PrimeField f(5);
  EXPECT_EQ((f.element(4) * f.element(4)).value(), 1U);
  EXPECT_EQ(f.element(2).inverse().value(), 3U);
  EXPECT_EQ((f.element(3) + f.element(4)).value(), 2U);
  EXPECT_EQ((f.element(1) - f.element(3)).value(), 3U);
  EXPECT_EQ((-f.element(2)).value(), 3U);
  EXPECT_EQ((-f.zero()).value(), 0U);
  EXPECT_EQ((f.element(4) / f.element(2)).value(), 2U);
  EXPECT_EQ(f.element(7).value(), 2U);
}

TEST(FieldElementTest, DivisionByZeroThrows) {
  const PrimeField f(5);
  try {
    (void)(f.element(3) / f.zero());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivisionByZero);
  }
  EXPECT_THROW((void)f.zero().inverse(), Error);
}

TEST(FieldElementTest, MixingFieldsThrows) {
  const PrimeField f5(5), f7(7);
  try {
    (void)(f5.one() + f7.one());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFieldMismatch);
  }
}

// Fermat over every nonzero element of every prime field up to 101.
TEST(FieldElementTest, FermatHoldsExhaustively) {
  for (std::uint64_t q = 2; q <= 101; ++q) {
    if (!is_prime(q)) continue;
    const PrimeField f(q);
    for (std::uint64_t a = 1; a < q; ++a) {
      const auto x = f.element(a);
      ASSERT_EQ(x.pow(q - 1), f.one()) << "q=" << q << " a=" << a;
      ASSERT_EQ(x * x.inverse(), f.one());
    }
  }
}

TEST(FieldElementTest, LargeModulusMultiplicationDoesNotOverflow) {
  const PrimeField f(1099511627689ULL);  // largest prime below 2^40
  const auto a = f.element(f.modulus() - 1);
  EXPECT_EQ((a * a).value(), 1U);  // (-1)^2
  EXPECT_EQ((a + a).value(), f.modulus() - 2);
}

}  // namespace
}  // namespace spir
