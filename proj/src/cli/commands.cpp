#include "dustmie/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "dustmie/channel.hpp"
#include "dustmie/charged_mie.hpp"
#include "dustmie/constants.hpp"
#include "dustmie/dust_field.hpp"
#include "dustmie/error.hpp"

namespace dustmie::cli {

namespace {

// Evaluates f(0..n-1) on up to `jobs` threads; results keep input order and
// the error of the lowest failing index is rethrown.
template <class F>
auto parallel_map(std::size_t n, std::size_t jobs, F f) -> std::vector<decltype(f(std::size_t{}))> {
    std::vector<decltype(f(std::size_t{}))> out(n);
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_at = n;
    std::exception_ptr failure;
    {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < std::min(jobs, n); ++k) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        out[i] = f(i);
                    } catch (...) {
                        std::lock_guard lock(mu);
                        if (i < failed_at) {
                            failed_at = i;
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::string label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string electrons_label(double v) { return std::to_string(static_cast<std::uint64_t>(v)); }

std::string seed_text(const RunConfig& rc) { return rc.seed ? std::to_string(*rc.seed) : "none"; }

std::string units_text(UnitsSelection u) {
    switch (u) {
        case UnitsSelection::physical: return "physical";
        case UnitsSelection::paper: return "paper";
        case UnitsSelection::both: return "both";
    }
    return "?";
}

SweepTable start_table(const RunConfig& rc) {
    SweepTable t;
    t.command = std::string(command_name(rc.command));
    t.config = rc.effective;
    t.metadata = {{"mode", rc.charge_mode == mie::ChargeMode::full ? "full" : "approx"},
                  {"units", units_text(rc.units)},
                  {"seed", seed_text(rc)}};
    return t;
}

void check_finite(const std::vector<double>& row, const SweepTable& t) {
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (!std::isfinite(row[j])) throw OverflowError("non-finite value in column " + t.columns[j].name);
    }
}

void warn_extrapolated(SweepTable& t, double altitude_m) {
    if (dust::fit_is_extrapolated(altitude_m)) {
        t.warnings.push_back("altitude " + label(altitude_m) +
                             " m lies above the 1000 m validity ceiling of the size-distribution fits");
    }
}

channel::DustOptions dust_options(const RunConfig& rc, channel::UnitsMode units) {
    channel::DustOptions o;
    o.units = units;
    o.charge = rc.charge_mode;
    o.quadrature.rel_tol = rc.quad_rel_tol;
    return o;
}

channel::AbsorptionProfile absorption(const RunConfig& rc) {
    return rc.absorption_profile ? channel::AbsorptionProfile::load(*rc.absorption_profile)
                                 : channel::AbsorptionProfile{};
}

}  // namespace

SweepTable cmd_qext(const RunConfig& rc, std::size_t jobs) {
    SweepTable t = start_table(rc);
    const SweepSpec& sweep = rc.sweep.value();
    const GroupSpec& groups = rc.groups.value();
    const bool x_sweep = sweep.variable == "x";
    const bool by_electrons = groups.by == "electrons";

    t.columns.push_back(x_sweep ? Column{"x", "1"} : Column{"frequency_hz", "Hz"});
    for (double g : groups.values) {
        t.columns.push_back({by_electrons ? "Q_ext[Ne=" + electrons_label(g) + "]" : "Q_ext[r=" + label(g) + " m]", "1"});
    }

    const auto grid = sweep.grid();
    const double gamma = mie::collision_frequency(rc.particle.temperature_k);
    std::atomic<std::size_t> unconverged{0};
    auto rows = parallel_map(grid.size(), jobs, [&](std::size_t i) {
        std::vector<double> row{grid[i]};
        const mie::WaveSpec wave = x_sweep ? rc.wave : mie::WaveSpec::from_frequency(grid[i]);
        for (double g : groups.values) {
            mie::ParticleState p = rc.particle;
            if (by_electrons) p.electrons = static_cast<std::uint64_t>(g);
            else p.radius_m = g;
            double x = 0.0;
            if (x_sweep) {
                x = grid[i];
                p.radius_m = x * wave.wavelength() / (2.0 * kPi);
            } else {
                x = mie::scale_parameter(p.radius_m, wave.wavelength());
            }
            p.validate();
            const auto g_e = mie::charged_coefficient(x, wave.angular_frequency(),
                                                      mie::surface_plasma_frequency(p.electrons, p.radius_m), gamma,
                                                      rc.charge_mode);
            const auto r = mie::extinction_efficiency(x, p.refractive_index, g_e, p.radius_m);
            if (!r.converged) ++unconverged;
            row.push_back(r.q_ext);
        }
        return row;
    });
    for (auto& row : rows) {
        check_finite(row, t);
        t.add_row(std::move(row));
    }
    if (unconverged > 0) {
        t.warnings.push_back(std::to_string(unconverged.load()) +
                             " Q_ext values change by more than 1e-10 relative when 5 orders are added");
    }
    return t;
}

SweepTable cmd_spectrum(const RunConfig& rc, std::size_t jobs) {
    SweepTable t = start_table(rc);
    const SweepSpec& sweep = rc.sweep.value();
    const GroupSpec& groups = rc.groups.value();

    t.columns.push_back({"radius_mm", "mm"});
    for (double h : groups.values) t.columns.push_back({"p[h=" + label(h) + " m]", "1/mm"});
    if (rc.n0_per_m3) {
        for (double h : groups.values) t.columns.push_back({"N_d[h=" + label(h) + " m]", "1/(m^3 mm)"});
    } else {
        t.warnings.push_back("dust.n0_per_m3 unset: N_d columns omitted");
    }
    for (double h : groups.values) warn_extrapolated(t, h);

    const auto grid = sweep.grid();
    auto rows = parallel_map(grid.size(), jobs, [&](std::size_t i) {
        std::vector<double> row{grid[i]};
        for (double h : groups.values) row.push_back(dust::size_pdf(grid[i], h, rc.layer));
        if (rc.n0_per_m3) {
            for (double h : groups.values) row.push_back(dust::number_density(grid[i], h, rc.layer));
        }
        return row;
    });
    for (auto& row : rows) {
        check_finite(row, t);
        t.add_row(std::move(row));
    }
    return t;
}

SweepTable cmd_attenuation(const RunConfig& rc, std::size_t jobs) {
    SweepTable t = start_table(rc);
    const SweepSpec& sweep = rc.sweep.value();
    const GroupSpec& groups = rc.groups.value();
    const bool altitude_sweep = sweep.variable == "altitude_m";

    dust::DustLayerModel layer = rc.layer;
    std::string unit = "dB/km";
    if (!rc.n0_per_m3) {
        layer.n0_per_m3 = 1.0;
        unit = "dB/km per m^-3";
        t.warnings.push_back("dust.n0_per_m3 unset: k_dust is given per unit N0");
    }
    std::vector<channel::UnitsMode> modes;
    if (rc.units != UnitsSelection::paper) modes.push_back(channel::UnitsMode::physical);
    if (rc.units != UnitsSelection::physical) modes.push_back(channel::UnitsMode::paper_literal);

    t.columns.push_back(altitude_sweep ? Column{"altitude_m", "m"} : Column{"frequency_hz", "Hz"});
    for (auto mode : modes) {
        for (double g : groups.values) {
            const bool paper = mode == channel::UnitsMode::paper_literal;
            t.columns.push_back({(paper ? "k_dust_paper[Ne=" : "k_dust[Ne=") + electrons_label(g) + "]",
                                 paper ? unit + " (paper-literal)" : unit});
        }
    }
    const auto profile = absorption(rc);
    if (!profile.empty()) t.columns.push_back({"k_abs", "dB/km"});

    const auto grid = sweep.grid();
    if (altitude_sweep) {
        warn_extrapolated(t, std::max(grid.front(), grid.back()));
    } else {
        warn_extrapolated(t, rc.dust_altitude_m);
    }

    auto rows = parallel_map(grid.size(), jobs, [&](std::size_t i) {
        const double h = altitude_sweep ? grid[i] : rc.dust_altitude_m;
        const mie::WaveSpec wave = altitude_sweep ? rc.wave : mie::WaveSpec::from_frequency(grid[i]);
        std::vector<double> row{grid[i]};
        for (auto mode : modes) {
            for (double g : groups.values) {
                mie::ParticleState p = rc.particle;
                p.electrons = static_cast<std::uint64_t>(g);
                row.push_back(channel::dust_attenuation_coefficient(h, wave, layer, p, dust_options(rc, mode)));
            }
        }
        if (!profile.empty()) row.push_back(profile.at(h));
        return row;
    });
    for (auto& row : rows) {
        check_finite(row, t);
        t.add_row(std::move(row));
    }
    return t;
}

SweepTable cmd_pathloss(const RunConfig& rc, std::size_t jobs) {
    (void)jobs;
    SweepTable t = start_table(rc);
    t.metadata.push_back({"trials", std::to_string(rc.trials)});
    const auto& g = rc.geometry;
    const auto profile = absorption(rc);
    const auto options = dust_options(rc, rc.units == UnitsSelection::paper ? channel::UnitsMode::paper_literal
                                                                              : channel::UnitsMode::physical);
    warn_extrapolated(t, g.h0_m + g.d_m * std::sin(g.theta_rad));
    if (rc.units == UnitsSelection::paper) t.warnings.push_back("dust loss uses the paper-literal weighting");

    const double f = rc.wave.frequency();
    if (rc.trials == 1) {
        channel::ShadowFading shadow = channel::ShadowFading::none();
        if (rc.seed) {
            shadow = channel::ShadowFading::seeded(*rc.seed);
        } else if (g.shadow_sigma_db > 0.0) {
            t.warnings.push_back("no seed given: shadow fading not sampled");
        }
        const auto r = channel::path_loss(g, rc.wave, rc.layer, rc.particle, shadow, profile, options);
        t.columns = {{"fspl_db", "dB"}, {"distance_term_db", "dB"}, {"shadow_db", "dB"},
                     {"dust_loss_db", "dB"}, {"total_db", "dB"}};
        std::vector<double> row{r.fspl_db, r.distance_term_db, r.shadow_db, r.dust_loss_db, r.total_db};
        check_finite(row, t);
        t.add_row(std::move(row));
        return t;
    }

    const double dust_db = channel::slant_dust_loss(g, rc.wave, rc.layer, rc.particle, profile, options);
    double shadow_mean = 0.0, shadow_m2 = 0.0, total_mean = 0.0, total_m2 = 0.0;
    channel::PathLossResult last;
    for (std::size_t i = 0; i < rc.trials; ++i) {
        last = channel::assemble_path_loss(g, f, dust_db, channel::ShadowFading::seeded(*rc.seed + i));
        const double k = static_cast<double>(i + 1);
        const double ds = last.shadow_db - shadow_mean;
        shadow_mean += ds / k;
        shadow_m2 += ds * (last.shadow_db - shadow_mean);
        const double dt = last.total_db - total_mean;
        total_mean += dt / k;
        total_m2 += dt * (last.total_db - total_mean);
    }
    const double dof = static_cast<double>(rc.trials - 1);
    t.columns = {{"trials", "1"},          {"fspl_db", "dB"},        {"distance_term_db", "dB"},
                 {"dust_loss_db", "dB"},   {"shadow_db_mean", "dB"}, {"shadow_db_std", "dB"},
                 {"total_db_mean", "dB"},  {"total_db_std", "dB"}};
    std::vector<double> row{static_cast<double>(rc.trials),
                            last.fspl_db,
                            last.distance_term_db,
                            dust_db,
                            shadow_mean,
                            std::sqrt(shadow_m2 / dof),
                            total_mean,
                            std::sqrt(total_m2 / dof)};
    check_finite(row, t);
    t.add_row(std::move(row));
    return t;
}

SweepTable run_command(const RunConfig& rc, std::size_t jobs) {
    switch (rc.command) {
        case Command::qext: return cmd_qext(rc, jobs);
        case Command::spectrum: return cmd_spectrum(rc, jobs);
        case Command::attenuation: return cmd_attenuation(rc, jobs);
        case Command::pathloss: return cmd_pathloss(rc, jobs);
    }
    throw ConfigError("unknown command");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"THz-band attenuation by charged dust: Mie sweeps, size spectra and link budgets.", "dustmie"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, format, mode, units, out_path, kabs_profile;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::size_t jobs = 1;
    std::vector<std::string> assignments;

    app.add_option("--config", config_path, "Config file (falls back to $DUSTMIE_CONFIG)");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--mode", mode, "Charged coefficient: full or approx")->check(CLI::IsMember({"full", "approx"}));
    app.add_option("--units", units, "k_dust weighting")->check(CLI::IsMember({"physical", "paper", "both"}));
    app.add_option("--seed", seed, "Shadow-fading seed");
    app.add_option("--trials", trials, "Monte-Carlo shadowing trials (pathloss)");
    app.add_option("--jobs", jobs, "Worker threads for sweeps (0 = all cores)");
    app.add_option("--out", out_path, "Output file (default stdout)");
    app.add_option("--kabs-profile", kabs_profile, "Molecular absorption profile: altitude_m dB_per_km per line");
    app.add_option("--set", assignments, "Override one key: section.key=value")->take_all();

    std::optional<Command> command;
    const std::pair<Command, const char*> subcommands[] = {
        {Command::qext, "Extinction efficiency over an x or frequency sweep"},
        {Command::spectrum, "Dust size spectrum per altitude"},
        {Command::attenuation, "Dust attenuation coefficient over altitude or frequency"},
        {Command::pathloss, "Link budget with dust loss and shadow fading"},
    };
    for (const auto& [c, description] : subcommands) {
        app.add_subcommand(std::string(command_name(c)), description)->callback([&command, c = c] { command = c; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        ConfigMap config;
        if (config_path.empty()) {
            if (const char* env = std::getenv("DUSTMIE_CONFIG"); env != nullptr && *env != '\0') config_path = env;
        }
        if (!config_path.empty()) config = load_config_file(config_path);
        for (const auto& a : assignments) apply_assignment(config, a);
        if (!format.empty()) set_value(config, "run", "format", format);
        if (!mode.empty()) set_value(config, "run", "mode", mode);
        if (!units.empty()) set_value(config, "run", "units", units);
        if (seed) set_value(config, "run", "seed", std::to_string(*seed));
        if (trials) set_value(config, "run", "trials", std::to_string(*trials));
        if (!kabs_profile.empty()) set_value(config, "absorption", "profile", kabs_profile);

        const RunConfig rc = resolve_run_config(config, command.value());
        if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
        const SweepTable table = run_command(rc, jobs);
        for (const auto& w : table.warnings) err << "dustmie: warning: " << w << "\n";

        const std::string text = render(table, rc.format);
        if (out_path.empty()) {
            out << text;
        } else {
            std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
            if (!file || !file.write(text.data(), static_cast<std::streamsize>(text.size()))) {
                throw ConfigError("cannot write " + out_path);
            }
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "dustmie: config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "dustmie: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "dustmie: numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace dustmie::cli
