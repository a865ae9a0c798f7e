#include <doctest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flames/costmodel.hpp"
#include "flames/errors.hpp"

using namespace flames;
using costmodel::MemoryMeter;
using costmodel::MemoryModelParams;

TEST_CASE("analytic step costs match hand-computed values") {
  const MemoryModelParams p{1000, 10, 10, 20, 100};
  CHECK(costmodel::beta_bytes(p) == 12000);
  // Batched: 10*1000 + 10*12000.
  CHECK(costmodel::bs_step2_memory(p) == 130000);
  // Sequential: 1000 + 2*10*12000.
  CHECK(costmodel::seqbs_step2_memory(p) == 241000);

  // k=1 collapse: both formulas reduce around alpha + beta.
  const MemoryModelParams one{1000, 1, 10, 20, 100};
  CHECK(costmodel::bs_step2_memory(one) == 1000 + 12000);
  CHECK(costmodel::seqbs_step2_memory(one) == 1000 + 2 * 12000);

  // Doubling k doubles the batched cost.
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    MemoryModelParams q{static_cast<std::int64_t>(1 + rng() % 100000),
                        static_cast<std::int64_t>(1 + rng() % 100),
                        static_cast<std::int64_t>(1 + rng() % 50),
                        static_cast<std::int64_t>(1 + rng() % 50),
                        static_cast<std::int64_t>(2 + rng() % 500)};
    MemoryModelParams q2 = q;
    q2.k = 2 * q.k;
    CHECK(costmodel::bs_step2_memory(q2) == 2 * costmodel::bs_step2_memory(q));
  }

  // With a free forward pass the sequential variant costs exactly double.
  const MemoryModelParams zero_alpha{0, 7, 3, 4, 11};
  CHECK(costmodel::seqbs_step2_memory(zero_alpha) ==
        2 * costmodel::bs_step2_memory(zero_alpha));

  // With a huge forward pass the sequential variant is far cheaper.
  const MemoryModelParams huge{1000000000, 10, 10, 20, 100};
  CHECK(costmodel::seqbs_step2_memory(huge) <
        costmodel::bs_step2_memory(huge));
}

TEST_CASE("memory delta identity and crossover") {
  // (k-1)*alpha - k*beta on raw constants.
  CHECK(costmodel::memory_delta(100, 10, 10) == 800);
  CHECK(costmodel::memory_delta(2, 1, 2) == 0);  // boundary alpha/beta = k/(k-1)
  CHECK(costmodel::memory_delta(1, 1, 2) == -1); // below the boundary
  // Degenerate k=1: always -beta, whatever alpha.
  CHECK(costmodel::memory_delta(123456, 10, 1) == -10);

  // delta == bs - seqbs exactly, over random parameterizations.
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    const MemoryModelParams p{static_cast<std::int64_t>(1 + rng() % 1000000),
                              static_cast<std::int64_t>(1 + rng() % 200),
                              static_cast<std::int64_t>(1 + rng() % 100),
                              static_cast<std::int64_t>(1 + rng() % 100),
                              static_cast<std::int64_t>(2 + rng() % 1000)};
    CHECK(costmodel::memory_delta(p) ==
          costmodel::bs_step2_memory(p) - costmodel::seqbs_step2_memory(p));
  }

  // Sign law, exact integer comparison: delta <= 0 iff (k-1)a <= k*b.
  for (int i = 0; i < 500; ++i) {
    const auto a = static_cast<std::int64_t>(1 + rng() % 1000000);
    const auto b = static_cast<std::int64_t>(1 + rng() % 1000000);
    const auto k = static_cast<std::int64_t>(2 + rng() % 199);
    const bool more = costmodel::seqbs_uses_more_memory(a, b, k);
    CHECK(more == (costmodel::memory_delta(a, b, k) <= 0));
    CHECK(more == ((k - 1) * a <= k * b));
  }
  CHECK_THROWS_AS(costmodel::seqbs_uses_more_memory(10, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("meter tracks the running peak") {
  MemoryMeter m;
  m.charge(5);
  m.charge(3);
  m.release(3);
  m.charge(4);
  CHECK(m.peak() == 9);
  CHECK_FALSE(m.oom());
  const auto r = m.reading();
  CHECK(r.peak_bytes == 9);
  CHECK(r.current_bytes == 9);
  CHECK_FALSE(r.oom);
}

TEST_CASE("meter records a cap breach without throwing") {
  MemoryMeter m(8);
  m.charge(5);
  m.charge(3);
  CHECK_FALSE(m.oom());  // exactly at the cap is not a breach
  m.release(3);
  m.charge(4);
  CHECK(m.oom());  // 9 > 8 at the final charge
  CHECK(m.peak() == 9);
  CHECK(m.reading().oom);
}

TEST_CASE("fresh meter reads zero") {
  const MemoryMeter m;
  const auto r = m.reading();
  CHECK(r.peak_bytes == 0);
  CHECK(r.current_bytes == 0);
  CHECK(r.per_step.empty());
  CHECK_FALSE(r.oom);
}

TEST_CASE("meter step accounting keeps peak equal to the step maximum") {
  MemoryMeter m;
  m.charge(5);
  m.release(5);
  m.step_mark();
  m.charge(3);
  m.release(3);
  m.step_mark();
  auto r = m.reading();
  REQUIRE(r.per_step.size() == 2);
  CHECK(r.per_step[0] == 5);
  CHECK(r.per_step[1] == 3);
  CHECK(r.peak_bytes == 5);

  // An open (unmarked) step is folded into the snapshot.
  m.charge(7);
  r = m.reading();
  REQUIRE(r.per_step.size() == 3);
  CHECK(r.per_step[2] == 7);
  CHECK(r.peak_bytes == 7);
  std::int64_t max_step = 0;
  for (auto s : r.per_step) max_step = std::max(max_step, s);
  CHECK(r.peak_bytes == max_step);
}

TEST_CASE("meter rejects nonsense charges") {
  MemoryMeter m;
  CHECK_THROWS_AS(m.charge(-1), std::invalid_argument);
  m.charge(4);
  CHECK_THROWS_AS(m.release(5), std::invalid_argument);
  CHECK_THROWS_AS(m.release(-2), std::invalid_argument);
}

TEST_CASE("beam-size sweep covers the fixed grid and flags cap breaches") {
  const auto& grid = costmodel::sweep_beam_grid();
  REQUIRE(grid.size() == 6);
  CHECK(grid == std::vector<std::int64_t>{1, 10, 25, 50, 100, 200});

  const MemoryModelParams base{1000, 1, 10, 20, 100};  // k ignored by sweep
  const auto rows = costmodel::sweep(base);
  REQUIRE(rows.size() == 6);
  // Strictly increasing batched cost, delta consistent, no cap -> no OOM.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].delta_bytes == rows[i].bs_bytes - rows[i].seqbs_bytes);
    CHECK_FALSE(rows[i].oom);
    if (i > 0) CHECK(rows[i].bs_bytes > rows[i - 1].bs_bytes);
  }
  CHECK(rows[1].bs_bytes == 130000);   // k=10
  CHECK(rows[1].seqbs_bytes == 241000);

  // Cap between the k=50 and k=100 values: exactly the top two rows breach.
  // bs(k) = k * 13000 here, so 650000 < cap=1000000 < 1300000.
  const auto capped = costmodel::sweep(base, 1000000);
  const std::vector<bool> expect{false, false, false, false, true, true};
  for (std::size_t i = 0; i < capped.size(); ++i)
    CHECK(capped[i].oom == expect[i]);
}

TEST_CASE("sweep serializes to the documented CSV") {
  const MemoryModelParams base{1000, 1, 10, 20, 100};
  const auto rows = costmodel::sweep(base, 1000000);
  std::ostringstream out;
  costmodel::write_sweep_csv(rows, out);
  const std::string expected =
      "k,bs_bytes,seqbs_bytes,delta_bytes,oom\n"
      "1,13000,25000,-12000,false\n"
      "10,130000,241000,-111000,false\n"
      "25,325000,601000,-276000,false\n"
      "50,650000,1201000,-551000,false\n"
      "100,1300000,2401000,-1101000,true\n"
      "200,2600000,4801000,-2201000,true\n";
  CHECK(out.str() == expected);
}
