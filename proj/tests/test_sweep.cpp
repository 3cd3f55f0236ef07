#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "rydosc/sweep.hpp"

using namespace rydosc;
namespace fs = std::filesystem;

namespace {

SweepSpec small_spec() {
    SweepSpec spec;
    spec.axis1 = {"G2", 0.05, 0.2, 2, AxisScale::linear};
    spec.axis2 = {"beta_sq", 0.1, 0.3, 2, AxisScale::linear};
    spec.mode = ResonanceMode::two_phonon;
    spec.fock_dim = 30;
    spec.k_atoms = 10;
    return spec;
}

} // namespace

TEST_CASE("axis value generation") {
    const SweepAxis lin{"G", 0.0, 1.0, 5, AxisScale::linear};
    const std::vector<double> lv = lin.values();
    REQUIRE(lv.size() == 5);
    CHECK(lv.front() == doctest::Approx(0.0));
    CHECK(lv[2] == doctest::Approx(0.5));
    CHECK(lv.back() == doctest::Approx(1.0));

    const SweepAxis lg{"gamma_m_over_r", 1e-4, 1e-2, 3, AxisScale::log};
    const std::vector<double> gv = lg.values();
    REQUIRE(gv.size() == 3);
    CHECK(gv[1] == doctest::Approx(1e-3).epsilon(1e-10));

    CHECK_THROWS_AS((SweepAxis{"bogus", 0.0, 1.0, 2}).validate(), DomainError);
    CHECK_THROWS_AS((SweepAxis{"G", 1.0, 0.0, 2}).validate(), DomainError);
    CHECK_THROWS_AS((SweepAxis{"G", -1.0, 1.0, 2, AxisScale::log}).validate(),
                    DomainError);
}

TEST_CASE("a 1x1 sweep reproduces the direct channel computation") {
    SweepSpec spec = small_spec();
    spec.axis1.min = spec.axis1.max = 0.2;
    spec.axis1.n_points = 1;
    spec.axis2.min = spec.axis2.max = 0.2;
    spec.axis2.n_points = 1;
    spec.fock_dim = 40;
    spec.k_atoms = 30;
    const SweepResult result = run_sweep(spec);
    REQUIRE(result.cells.size() == 1);
    const SweepCell& cell = result.cells.front();
    CHECK(cell.diagnostics.error.empty());
    CHECK(cell.diagnostics.truncation_ok);

    const PassageChannel channel{ResonanceMode::two_phonon, 0.2,
                                 AtomState::from_population(0.2)};
    const DensityMatrix direct =
        iterate_passages(channel, vacuum(FockSpace(40)), 30).states.back();
    CHECK(cell.values.at("mean_n") ==
          doctest::Approx(mean_phonons(direct)).epsilon(1e-10));
    CHECK(cell.values.at("v_neg") ==
          doctest::Approx(negative_volume(wigner(direct))).epsilon(1e-8));
}

TEST_CASE("sweeps are deterministic") {
    const SweepSpec spec = small_spec();
    const SweepResult a = run_sweep(spec);
    const SweepResult b = run_sweep(spec);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        for (const auto& [key, value] : a.cells[i].values)
            CHECK(value == b.cells[i].values.at(key));
}

TEST_CASE("cell indexing and nearest lookup") {
    const SweepResult result = run_sweep(small_spec());
    REQUIRE(result.cells.size() == 4);
    CHECK(result.cell(1, 0).i == 1);
    CHECK(result.cell(1, 0).j == 0);
    const SweepCell& near = result.nearest(0.19, 0.12);
    CHECK(near.i == 1);
    CHECK(near.j == 0);
}

TEST_CASE("negativity grows with coupling in the cat regime") {
    SweepSpec spec = small_spec();
    spec.axis1 = {"G2", 0.05, 0.2, 4, AxisScale::linear};
    spec.axis2 = {"beta_sq", 0.2, 0.2, 1, AxisScale::linear};
    spec.fock_dim = 40;
    spec.k_atoms = 30;
    const SweepResult result = run_sweep(spec);
    double prev = -1.0;
    for (int i = 0; i < 4; ++i) {
        const double v = result.cell(i, 0).values.at("v_neg");
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    CHECK(result.cell(3, 0).values.at("v_neg") >
          result.cell(0, 0).values.at("v_neg") + 0.05);
}

TEST_CASE("engines agree at weak coupling") {
    SweepSpec spec = small_spec();
    spec.axis1 = {"G2", 0.02, 0.05, 2, AxisScale::linear};
    spec.axis2 = {"beta_sq", 0.2, 0.2, 1, AxisScale::linear};
    spec.fock_dim = 40;
    spec.k_atoms = 10;
    const SweepResult exact = run_sweep(spec);
    spec.engine = SweepEngine::master_equation;
    const SweepResult master = run_sweep(spec);
    for (int i = 0; i < 2; ++i) {
        const double ve = exact.cell(i, 0).values.at("v_neg");
        const double vm = master.cell(i, 0).values.at("v_neg");
        CHECK(std::abs(ve - vm) < 5e-3);
        CHECK(std::abs(exact.cell(i, 0).values.at("mean_n") -
                       master.cell(i, 0).values.at("mean_n")) < 5e-2);
    }
}

TEST_CASE("per-cell failures are contained in diagnostics") {
    SweepSpec spec = small_spec();
    spec.fock_dim = 8;
    spec.axis1 = {"G2", 0.3, 0.3, 1, AxisScale::linear};
    spec.axis2 = {"beta_sq", 0.6, 0.6, 1, AxisScale::linear};
    spec.k_atoms = 200; // above-threshold heating must hit the truncation guard
    const SweepResult result = run_sweep(spec); // must not throw
    CHECK(!result.cells.front().diagnostics.error.empty());
}

TEST_CASE("persistence round-trips the sweep") {
    const SweepSpec spec = small_spec();
    const SweepResult result = run_sweep(spec);
    const fs::path out = fs::temp_directory_path() / "rydosc_sweep_test";
    fs::remove_all(out);
    const fs::path run_dir = write_sweep_result(result, out);
    REQUIRE(fs::exists(run_dir / "result.json"));
    REQUIRE(fs::exists(run_dir / "result.csv"));

    std::ifstream in(run_dir / "result.json");
    const nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j.contains("spec"));
    CHECK(j.contains("provenance"));
    CHECK(j.contains("axes"));
    CHECK(j.contains("cells"));
    CHECK(j["cells"].size() == result.cells.size());
    CHECK(j["spec"]["fock_dim"] == spec.fock_dim);
    CHECK(j["spec"]["axis1"]["name"] == "G2");
    CHECK(j["provenance"]["fock_dim"] == spec.fock_dim);
    for (const auto& cell : j["cells"]) {
        CHECK(cell.contains("i"));
        CHECK(cell.contains("j"));
        CHECK(cell.contains("values"));
        CHECK(cell.contains("diagnostics"));
    }

    std::ifstream csv(run_dir / "result.csv");
    std::string line;
    int lines = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 1 + int(result.cells.size())); // header + one row per cell
    fs::remove_all(out);
}

TEST_CASE("feasibility report for the reference parameters") {
    const PhysicalParams p = PhysicalParams::cs_reference();
    const FeasibilityReport rep = feasibility_report(p, 10e-3);
    CHECK(rep.g_two_phonon > 0.5e-5);
    CHECK(rep.g_two_phonon < 2e-5);
    CHECK(rep.g_quadrupole > 0.5e-9);
    CHECK(rep.g_quadrupole < 2e-9);
    CHECK(rep.nbar_th < 1e-5); // 3 GHz mode at 10 mK is frozen out
    CHECK(rep.atom_spacing_m == doctest::Approx(p.speed / p.rate));
    CHECK(rep.single_atom_ok == (rep.atom_spacing_m >= 10.0 * rep.interaction_length_m));
}

TEST_CASE("wigner snapshots follow the sweep configuration") {
    SweepSpec spec = small_spec();
    spec.fock_dim = 40;
    spec.k_atoms = 30;
    const std::vector<WignerSnapshot> snaps =
        snapshot_wigner(spec, {{0.2, 0.2}, {0.06, 0.1}});
    REQUIRE(snaps.size() == 2);
    CHECK(snaps[0].v_neg > 0.1);       // cat point
    CHECK(snaps[1].min_variance < 0.5); // squeezing point
}
