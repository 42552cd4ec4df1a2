#include "pathrev/report_io.hpp"

#include <gtest/gtest.h>

using namespace pathrev;

TEST(Stats, Summary)
{
    const std::vector<double> xs{1, 2, 3, 4};
    const auto s = summarize(xs);
    EXPECT_EQ(s.count, 4u);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.variance, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(s.std_error, std::sqrt(5.0 / 3.0 / 4.0));
    EXPECT_EQ(summarize(std::vector<double>{}).count, 0u);
}

TEST(Stats, BatchMeans)
{
    std::vector<double> xs;
    for (int i = 0; i < 300; ++i) {
        xs.push_back(i % 2);
    }
    // every batch of 10 has mean 1/2
    EXPECT_DOUBLE_EQ(batch_means_std_error(xs, 30), 0.0);
    std::vector<double> ramp;
    for (int i = 0; i < 300; ++i) {
        ramp.push_back(i);
    }
    EXPECT_GT(batch_means_std_error(ramp, 30), 0.0);
}

TEST(ReportIo, DistributionFormats)
{
    const auto d = cost_distribution_pgf(4);
    EXPECT_EQ(to_csv(d), "n,k,p_num,p_den\n4,1,1,3\n4,2,1,2\n4,3,1,6\n");
    const auto j = to_json(d);
    EXPECT_EQ(j["n"], 4);
    EXPECT_EQ(j["probs"][1]["p"], "1/2");

    const auto m = moments_json(10, moments(10));
    EXPECT_EQ(m["mean"], "7129/2520");
    EXPECT_EQ(m.begin().key(), "n");
}

TEST(ReportIo, SimulationCsv)
{
    SimConfig c;
    c.n = 3;
    c.max_requests = 5;
    c.seed = 1;
    const auto csv = to_csv(run_simulation(c));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "request_id,origin,messages,wait_time,granted_at");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}
