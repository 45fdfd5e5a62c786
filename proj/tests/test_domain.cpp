#include <doctest.h>

#include <cmath>
#include <vector>

#include "pcn/domain.hpp"
#include "pcn/rng.hpp"

using namespace pcn;

TEST_CASE("cle_update fixed points and Eq. 1 evaluation") {
    CleEstimator est;
    est.weight = 0.9;

    est.cle = 0;
    CHECK(cle_update(est, 0) == doctest::Approx(0.0));  // no congestion stays at 0

    est.cle = 1;
    CHECK(cle_update(est, 1) == doctest::Approx(1.0));  // pre-congestion stays at 1

    est.cle = 0.5;
    CHECK(cle_update(est, 1) == doctest::Approx(0.55));  // 0.1*1 + 0.9*0.5

    CHECK_THROWS_AS(cle_update(est, 2), std::invalid_argument);
}

TEST_CASE("cle stays in [0,1] for any bit sequence and converges geometrically") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        CleEstimator est;
        est.weight = 0.05 + 0.9 * rng.next_unit();
        est.cle = rng.next_unit();
        for (int i = 0; i < 200; ++i) {
            cle_update(est, static_cast<int>(rng.next_below(2)));
            CHECK(est.cle >= 0.0);
            CHECK(est.cle <= 1.0);
        }
    }

    // Constant input b: |cle_n - b| = w^n * |cle_0 - b|.
    for (int b = 0; b <= 1; ++b) {
        CleEstimator est;
        est.weight = 0.9;
        est.cle = 0.3;
        const double gap0 = std::abs(est.cle - b);
        for (int n = 1; n <= 50; ++n) {
            cle_update(est, b);
            const double expect = std::pow(0.9, n) * gap0;
            CHECK(std::abs(est.cle - b) == doctest::Approx(expect).epsilon(1e-9));
        }
    }
}

TEST_CASE("egress_feedback blocks at and above the threshold") {
    CleEstimator est;
    est.admit_threshold = 0.5;

    est.cle = 0;
    CHECK(egress_feedback(est, SimTime(1)).decision == AdmissionDecision::Admit);

    est.cle = 1;
    CHECK(egress_feedback(est, SimTime(2)).decision == AdmissionDecision::Block);

    est.cle = 0.5;  // boundary blocks for tie stability
    const AdmissionSignal sig = egress_feedback(est, SimTime(3));
    CHECK(sig.decision == AdmissionDecision::Block);
    CHECK(sig.cle_snapshot == doctest::Approx(0.5));
    CHECK(sig.issued_at == SimTime(3));
}

TEST_CASE("signal invariant: Block exactly when the snapshot crosses the threshold") {
    Rng rng(12);
    CleEstimator est;
    est.admit_threshold = 0.37;
    for (int i = 0; i < 1000; ++i) {
        est.cle = rng.next_unit();
        const AdmissionSignal sig = egress_feedback(est, SimTime(i));
        CHECK((sig.decision == AdmissionDecision::Block) ==
              (sig.cle_snapshot >= est.admit_threshold));
    }
}

TEST_CASE("ingress_admission applies the signal and rejects bad states") {
    const AdmissionSignal admit{AdmissionDecision::Admit, SimTime(1), 0.1};
    const AdmissionSignal block{AdmissionDecision::Block, SimTime(1), 0.9};

    Flow a(1, 15);
    ingress_admission(a, admit, SimTime(2));
    CHECK(a.state() == FlowState::Admitted);
    CHECK(*a.admitted_at() == SimTime(2));

    Flow b(2, 15);
    ingress_admission(b, block, SimTime(2));
    CHECK(b.state() == FlowState::Blocked);

    CHECK_THROWS_AS(ingress_admission(a, block, SimTime(3)), std::invalid_argument);
}

TEST_CASE("classify_precongestion boundaries") {
    LinkConfig link{100e6, 70e6, 90e6, 90e6};
    CHECK(classify_precongestion(35e6, link) == PreCongestionState::NoPreCongestion);
    CHECK(classify_precongestion(70e6, link) == PreCongestionState::NoPreCongestion);  // r = Ar
    CHECK(classify_precongestion(80e6, link) == PreCongestionState::ArPreCongested);
    CHECK(classify_precongestion(90e6, link) == PreCongestionState::ArPreCongested);   // r = Sr
    CHECK(classify_precongestion(180e6, link) == PreCongestionState::SrPreCongested);
    CHECK_THROWS_AS(classify_precongestion(-1, link), std::invalid_argument);
}

TEST_CASE("classify_precongestion is monotone in r") {
    LinkConfig link{100e6, 70e6, 90e6, 90e6};
    int prev = 0;
    for (double r = 0; r <= 200e6; r += 1e6) {
        const int cur = static_cast<int>(classify_precongestion(r, link));
        CHECK(cur >= prev);
        prev = cur;
    }
}

namespace {

std::vector<Flow> admitted_population(int n, Rng& rng, SimTime now) {
    std::vector<Flow> flows;
    for (int i = 0; i < n; ++i) {
        Flow f(static_cast<std::uint64_t>(i + 1), 15);
        f.admit(SimTime(static_cast<std::int64_t>(rng.next_below(
            static_cast<std::uint64_t>(now.usec)))));
        flows.push_back(f);
    }
    return flows;
}

}  // namespace

TEST_CASE("flow_termination worked examples") {
    LinkConfig link{100e6, 70e6, 90e6, 90e6};
    Rng rng(3);
    const SimTime now = SimTime::from_seconds(100);

    SUBCASE("r below Sr terminates nothing") {
        auto flows = admitted_population(5, rng, now);
        CHECK(flow_termination(std::span<Flow>(flows), 80e6, link, 1e6, now).empty());
        for (const auto& f : flows) CHECK(f.state() == FlowState::Admitted);
    }

    SUBCASE("fractional deficit rounds up") {
        auto flows = admitted_population(10, rng, now);
        const double r = 90e6 + 2.5 * 1e6;
        const auto ids = flow_termination(std::span<Flow>(flows), r, link, 1e6, now);
        CHECK(ids.size() == 3);
    }

    SUBCASE("deficit beyond the population terminates everyone") {
        auto flows = admitted_population(2, rng, now);
        const auto ids = flow_termination(std::span<Flow>(flows), 90e6 + 5e6, link, 1e6, now);
        CHECK(ids.size() == 2);
        for (const auto& f : flows) CHECK(f.state() == FlowState::Terminated);
    }
}

TEST_CASE("flow_termination picks newest admissions first") {
    LinkConfig link{100e6, 70e6, 90e6, 90e6};
    std::vector<Flow> flows;
    for (int i = 0; i < 4; ++i) {
        Flow f(static_cast<std::uint64_t>(i + 1), 15);
        f.admit(SimTime(100 * (i + 1)));  // flow 4 admitted last
        flows.push_back(f);
    }
    const auto ids =
        flow_termination(std::span<Flow>(flows), 90e6 + 1.5e6, link, 1e6, SimTime(10'000));
    REQUIRE(ids.size() == 2);
    CHECK(ids[0] == 4);
    CHECK(ids[1] == 3);
    CHECK(flows[0].state() == FlowState::Admitted);
    CHECK(flows[1].state() == FlowState::Admitted);
}

TEST_CASE("flow_termination matches brute-force minimal k on random instances") {
    Rng rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        LinkConfig link;
        link.capacity_bps = 1e6 + rng.next_unit() * 1e9;
        link.supportable_rate_bps = link.capacity_bps * (0.3 + 0.6 * rng.next_unit());
        link.admissible_rate_bps = link.supportable_rate_bps * (0.2 + 0.7 * rng.next_unit());
        link.objective_rate_bps = link.admissible_rate_bps +
                                  (link.capacity_bps - link.admissible_rate_bps) * rng.next_unit();
        const double per_flow = 1e3 + rng.next_unit() * 1e6;
        const double r = link.supportable_rate_bps * (0.5 + rng.next_unit());
        const int population = static_cast<int>(rng.next_below(40));
        const SimTime now = SimTime::from_seconds(50);
        auto flows = admitted_population(population, rng, now);

        auto copy = flows;
        const auto ids = flow_termination(std::span<Flow>(flows), r, link, per_flow, now);

        // Oracle: smallest k with r - k*per_flow <= Sr, capped at the population.
        int brute_k = 0;
        if (r > link.supportable_rate_bps) {
            while (brute_k < population &&
                   r - brute_k * per_flow > link.supportable_rate_bps)
                ++brute_k;
        }
        CHECK(ids.size() == static_cast<std::size_t>(brute_k));
        (void)copy;
    }
}

TEST_CASE("interior_process applies meter verdicts") {
    Rng rng(5);

    SUBCASE("forward leaves the packet unchanged") {
        RedMeter meter(RedParams{1.0, 5, 15, 0.1});
        const Packet in = make_packet(1, 2, 1040, EcnCodepoint::Ect0, SimTime{});
        auto out = interior_process(in, meter, SimTime(1), 0, rng);
        REQUIRE(out.has_value());
        CHECK_FALSE(out->pcn_marked);
        CHECK(out->codepoint == EcnCodepoint::Ect0);
    }

    SUBCASE("mark sets the PCN mark") {
        RedMeter meter(RedParams{1.0, 5, 15, 0.1});
        const Packet in = make_packet(1, 2, 1040, EcnCodepoint::Ect0, SimTime{});
        auto out = interior_process(in, meter, SimTime(1), 40, rng);
        REQUIRE(out.has_value());
        CHECK(out->pcn_marked);
    }

    SUBCASE("drop removes the packet") {
        EcnMeter meter(RedParams{1.0, 5, 15, 0.1});
        const Packet in = make_packet(1, 2, 1040, EcnCodepoint::NotEct, SimTime{});
        auto out = interior_process(in, meter, SimTime(1), 40, rng);
        CHECK_FALSE(out.has_value());
    }
}
