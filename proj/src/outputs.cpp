#include "qotto/outputs.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <system_error>

#include "qotto/config.hpp"
#include "qotto/errors.hpp"

namespace qotto {

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    return format_double(x);
}

}  // namespace

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_manifest(const RunManifest& m) {
    std::string out;
    out += "# qotto manifest\n";
    out += "# verb: " + m.verb + "\n";
    out += "# version: " + m.version + "\n";
    out += "# seed: " + std::to_string(m.config.stepper.seed) + "\n";
    out += "# timestamp: " + m.timestamp + "\n";
    out += "# output_dir: " + m.output_dir + "\n";
    out += emit_config(m.config);
    return out;
}

OutputWriter::OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
        throw IoError(dir_.string() + ": cannot create output directory");
    }
    const auto probe = dir_ / ".qotto_write_test";
    {
        std::ofstream f(probe, std::ios::binary);
        if (!f || !(f << "ok") || !f.flush()) {
            throw IoError(dir_.string() + ": output directory is not writable");
        }
    }
    std::filesystem::remove(probe, ec);
}

std::ofstream OutputWriter::open(const std::string& name, bool append) const {
    const auto path = dir_ / name;
    std::ofstream f(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
    if (!f) throw IoError(path.string() + ": cannot open for writing");
    return f;
}

void OutputWriter::write_manifest(const RunManifest& manifest) {
    auto f = open("manifest.conf", false);
    f << format_manifest(manifest);
    if (!f.flush()) throw IoError((dir_ / "manifest.conf").string() + ": write failed");
}

void OutputWriter::begin() {
    open("summary.csv", false) << "scheme,lambda,mean_work,sem_work,var_work,q_in,efficiency,n_traj\n";
    open("populations.csv", false) << "scheme,lambda,t,delta,n_a,N_A,N_B\n";
    open("work_hist.csv", false) << "scheme,lambda,bin_center,probability\n";
}

void OutputWriter::append(Scheme scheme, double lambda, const CycleResult& r) {
    const std::string tag = std::string(to_string(scheme)) + "," + num(lambda) + ",";
    {
        auto f = open("summary.csv", true);
        f << tag << num(r.mean_work) << ',' << num(r.sem_work) << ',' << num(r.var_work) << ','
          << num(r.q_in) << ',' << num(r.efficiency) << ',' << r.n_traj_used << '\n';
        if (!f.flush()) throw IoError("summary.csv: write failed");
    }
    {
        auto f = open("populations.csv", true);
        const PopulationCurves& c = r.curves;
        for (std::size_t j = 0; j < c.t.size(); ++j) {
            f << tag << num(c.t[j]) << ',' << num(c.delta[j]) << ',' << num(c.n_a[j]) << ','
              << num(c.N_A[j]) << ',' << num(c.N_B[j]) << '\n';
        }
        if (!f.flush()) throw IoError("populations.csv: write failed");
    }
    {
        auto f = open("work_hist.csv", true);
        const Histogram& h = r.histogram;
        for (std::size_t b = 0; b < h.mass.size(); ++b) {
            f << tag << num(h.center(int(b))) << ',' << num(h.mass[b]) << '\n';
        }
        if (!f.flush()) throw IoError("work_hist.csv: write failed");
    }
}

}  // namespace qotto
