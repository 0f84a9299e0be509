#pragma once

// CSV and manifest emission. All files are UTF-8 with LF line endings, a
// header row and `.` decimals; numbers are written in shortest round-trip
// form so identical runs give identical bytes.
//
//   summary.csv      scheme,lambda,mean_work,sem_work,var_work,q_in,efficiency,n_traj
//   populations.csv  scheme,lambda,t,delta,n_a,N_A,N_B
//   work_hist.csv    scheme,lambda,bin_center,probability
//   manifest.conf    resolved configuration, parseable with --config

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "qotto/engine.hpp"

namespace qotto {

struct RunManifest {
    CycleConfig config;
    std::string verb = "run";
    std::string version = QOTTO_VERSION;
    std::string timestamp;  ///< ISO 8601 UTC
    std::string output_dir;
};

/// Manifest text: provenance as comments, then emit_config(config).
std::string format_manifest(const RunManifest& manifest);

std::string utc_timestamp();

class OutputWriter {
public:
    /// Creates `dir` if needed and checks that it is writable; throws IoError
    /// otherwise. Nothing is written yet.
    explicit OutputWriter(std::filesystem::path dir);

    const std::filesystem::path& dir() const noexcept { return dir_; }

    void write_manifest(const RunManifest& manifest);
    /// Truncates the three CSVs and writes their header rows.
    void begin();
    /// Appends one run's rows to every CSV and flushes.
    void append(Scheme scheme, double lambda, const CycleResult& result);

private:
    std::ofstream open(const std::string& name, bool append) const;

    std::filesystem::path dir_;
};

}  // namespace qotto
