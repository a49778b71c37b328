#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "synthhome/backend.hpp"
#include "synthhome/concurrency.hpp"
#include "synthhome/error.hpp"
#include "synthhome/occlusion.hpp"

using namespace synthhome;

TEST(WithRetries, RetriesOnlyTransportErrors) {
  int calls = 0;
  const RetryPolicy policy{3, std::chrono::milliseconds(0), 1.0};
  EXPECT_EQ(with_retries(policy, "x", [&] {
              if (++calls < 3) throw TransportError("flaky");
              return 7;
            }),
            7);
  EXPECT_EQ(calls, 3);

  calls = 0;
  EXPECT_THROW(with_retries(policy, "x", [&]() -> int {
                 ++calls;
                 throw TransportError("down");
               }),
               BackendError);
  EXPECT_EQ(calls, 3);

  calls = 0;
  EXPECT_THROW(with_retries(policy, "x", [&]() -> int {
                 ++calls;
                 throw InputError("bad");
               }),
               InputError);
  EXPECT_EQ(calls, 1);
}

TEST(MockVision, DeterministicAndPixelSensitive) {
  MockVisionBackend v;
  const auto a = test::solid_png(10, 10, {1, 2, 3});
  const auto b = test::solid_png(10, 10, {1, 2, 4});
  EXPECT_EQ(v.describe(a, "p"), v.describe(a, "p"));
  EXPECT_NE(v.describe(a, "p"), v.describe(b, "p"));
  EXPECT_EQ(v.describe(a, "prompt").rfind("MOCK:", 0), 0u);
}

TEST(HashingEmbedding, SimilarTextsAreCloser) {
  HashingEmbeddingBackend e(256);
  const auto roof1 = e.embed("the roof is in good condition with new shingles");
  const auto roof2 = e.embed("the roof is in good condition with old shingles");
  const auto other = e.embed("floor plan shows three bedrooms and a kitchen");
  EXPECT_EQ(roof1.size(), 256u);
  EXPECT_EQ(e.embed("same text"), e.embed("same text"));
  EXPECT_LT(cosine_distance(roof1, roof2), cosine_distance(roof1, other));
}

TEST(ScriptedText, RepeatsLastResponse) {
  ScriptedTextBackend s({"a", "b"});
  EXPECT_EQ(s.generate("1", {}), "a");
  EXPECT_EQ(s.generate("2", {}), "b");
  EXPECT_EQ(s.generate("3", {}), "b");
  EXPECT_EQ(s.calls(), 3);
  EXPECT_EQ(s.prompts().back(), "3");
}

TEST(ParallelMap, PositionalResultsAndErrors) {
  std::vector<int> items(100);
  for (int i = 0; i < 100; ++i) items[i] = i;
  auto out = parallel_map(
      items,
      [](int i) {
        if (i == 42) throw InputError("42");
        return i * i;
      },
      8);
  ASSERT_EQ(out.size(), 100u);
  for (int i = 0; i < 100; ++i) {
    if (i == 42) {
      EXPECT_FALSE(out[i].ok());
    } else {
      EXPECT_EQ(*out[i].value, i * i);
    }
  }
}

TEST(InFlightLimit, CapsConcurrency) {
  InFlightLimit limit(2);
  std::atomic<int> active{0}, peak{0};
  std::vector<int> items(16);
  parallel_map(
      items,
      [&](int) {
        auto slot = limit.hold();
        const int now = ++active;
        int p = peak.load();
        while (now > p && !peak.compare_exchange_weak(p, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        --active;
        return 0;
      },
      8);
  EXPECT_LE(peak.load(), 2);
}

TEST(TokenBucket, LimitsRate) {
  TokenBucket bucket(200.0, 1.0);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 5; ++i) bucket.acquire();
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GE(elapsed, 0.015);  // 4 waits of 5 ms after the first token
}
