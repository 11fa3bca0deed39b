// Generates the bundled synthetic daily panel: a 12-asset universe with a
// small common market factor, planted sender assets whose lead shocks feed
// the receivers with a lag, per-asset GARCH volatility clustering, volume
// coupled to volatility, and a few missing cells on one minor asset.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "riskpipe/date.hpp"
#include "riskpipe/rng.hpp"

using riskpipe::Date;
using riskpipe::Rng;

namespace {

struct AssetSpec {
    const char* name;
    double beta;       // market loading
    double lead_coef;  // receiver loading on this asset's lagged lead shock
    int lead_lag;      // lag at which the lead arrives
    double lead_vol;   // vol of the lead shock (senders only)
    double garch_vol;  // unconditional vol of the private GARCH component
    double start_price;
    double supply;     // market cap = supply * close
    bool has_cap;      // emit a market_cap column
};

// The lead shocks are iid and shared forward in time only; volatility
// clustering lives in each asset's private GARCH component. Keeping the
// shared pieces homoskedastic keeps the pairwise Granger sizes clean, so the
// network edges reflect the planted structure.
const AssetSpec kAssets[] = {
    {"BTC", 1.00, 0.50, 1, 0.024, 0.020, 30000.0, 19.0e6, true},
    {"ETH", 1.10, 0.45, 1, 0.023, 0.020, 1000.0, 120.0e6, true},
    {"BNB", 1.05, 0.45, 2, 0.022, 0.019, 40.0, 150.0e6, true},
    {"SOL", 1.20, 0.40, 1, 0.022, 0.021, 2.0, 400.0e6, true},
    {"ADA", 1.10, 0.38, 2, 0.021, 0.019, 0.2, 35.0e9, true},
    {"DOT", 1.05, 0.38, 3, 0.021, 0.019, 8.0, 1.2e9, false},
    {"LINK", 1.10, 0.35, 1, 0.020, 0.020, 12.0, 500.0e6, true},
    {"XRP", 0.20, 0.00, 1, 0.0, 0.024, 0.25, 50.0e9, true},
    {"LTC", 0.18, 0.00, 1, 0.0, 0.023, 130.0, 70.0e6, true},
    {"AVAX", 0.25, 0.00, 1, 0.0, 0.026, 3.5, 300.0e6, true},
    {"UNI", 0.22, 0.00, 1, 0.0, 0.025, 5.0, 600.0e6, true},
    {"DOGE", 0.15, 0.00, 1, 0.0, 0.028, 0.005, 130.0e9, true},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic daily asset panel generator"};
    std::string out_dir = "data/synth";
    int days = 1600;
    uint64_t seed = 6;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--days", days, "number of calendar days");
    app.add_option("--seed", seed, "rng seed");
    CLI11_PARSE(app, argc, argv);

    std::filesystem::create_directories(out_dir);
    const int n = static_cast<int>(std::size(kAssets));
    Rng rng(seed);

    // Mild common volatility regime: enough for market-wide risk dynamics,
    // small enough that the planted sender edges still dominate the network.
    std::vector<double> market(days);
    {
        const double uncond = 1.69e-4, alpha = 0.16, beta = 0.78;
        double h = uncond;
        double prev = 0.0;
        for (int t = 0; t < days; ++t) {
            h = uncond * (1.0 - alpha - beta) + alpha * prev * prev + beta * h;
            prev = std::sqrt(h) * rng.normal();
            market[t] = prev;
        }
    }

    // Lead shocks (iid) and private GARCH components.
    std::vector<std::vector<double>> lead(n, std::vector<double>(days, 0.0));
    std::vector<std::vector<double>> garch(n, std::vector<double>(days));
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < days; ++t)
            if (kAssets[i].lead_vol > 0.0) lead[i][t] = kAssets[i].lead_vol * rng.normal();
        const double uncond = kAssets[i].garch_vol * kAssets[i].garch_vol;
        const double alpha = 0.09, beta = 0.87;
        double h = uncond;
        double prev = 0.0;
        for (int t = 0; t < days; ++t) {
            h = uncond * (1.0 - alpha - beta) + alpha * prev * prev + beta * h;
            prev = std::sqrt(h) * rng.normal();
            garch[i][t] = prev;
        }
    }

    // Pecking order: each sender leads every asset listed after it, so the
    // network is dense among the senders and the receivers only listen.
    std::vector<std::vector<double>> returns(n, std::vector<double>(days));
    for (int t = 0; t < days; ++t) {
        for (int i = 0; i < n; ++i) {
            double r = kAssets[i].beta * market[t] + garch[i][t] + lead[i][t];
            for (int s = 0; s < i; ++s) {
                const auto& src = kAssets[s];
                if (src.lead_coef == 0.0 || t < src.lead_lag) continue;
                r += src.lead_coef * lead[s][t - src.lead_lag];
            }
            returns[i][t] = r;
        }
    }

    const Date start = Date::from_ymd(2021, 1, 1);
    for (int i = 0; i < n; ++i) {
        const AssetSpec& a = kAssets[i];
        std::ofstream out(std::filesystem::path(out_dir) / (std::string(a.name) + ".csv"));
        out << "date,open,high,low,close,volume" << (a.has_cap ? ",market_cap" : "") << "\n";

        double close = a.start_price;
        for (int t = 0; t < days; ++t) {
            const double open = close;
            close = open * std::exp(returns[i][t]);
            const double day_vol = std::abs(returns[i][t]) + 0.25 * a.garch_vol;
            const double high =
                std::max(open, close) * std::exp(0.4 * day_vol * std::abs(rng.normal()));
            const double low =
                std::min(open, close) * std::exp(-0.4 * day_vol * std::abs(rng.normal()));
            const double volume = (1.0e7 / a.start_price) *
                                  std::exp(1.5 * std::abs(returns[i][t]) + 0.3 * rng.normal());

            // A few gaps on DOGE volume to exercise missing propagation.
            const bool gap = std::string(a.name) == "DOGE" && t % 237 == 101;

            char buf[512];
            std::snprintf(buf, sizeof(buf), "%s,%.8g,%.8g,%.8g,%.8g,",
                          (start + t).to_string().c_str(), open, high, low, close);
            out << buf;
            if (!gap) {
                std::snprintf(buf, sizeof(buf), "%.8g", volume);
                out << buf;
            }
            if (a.has_cap) {
                std::snprintf(buf, sizeof(buf), ",%.8g", a.supply * close);
                out << buf;
            }
            out << "\n";
        }
        std::printf("wrote %s/%s.csv\n", out_dir.c_str(), a.name);
    }
    return 0;
}
