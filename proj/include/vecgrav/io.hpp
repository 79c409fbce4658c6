#pragma once

// CSV and plain-text writers. Floats use 17 significant digits so identical
// inputs give byte-identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vecgrav/errors.hpp"
#include "vecgrav/field_kinematics.hpp"
#include "vecgrav/potential_solvers.hpp"
#include "vecgrav/report.hpp"
#include "vecgrav/waves.hpp"

namespace vecgrav {

namespace detail {

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : path_(path), out_(path) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  }
  void header(const char* text) { out_ << text << '\n'; }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      first = false;
      std::snprintf(buf_, sizeof buf_, "%.17g", v);
      out_ << buf_;
    }
    out_ << '\n';
  }
  void close() {
    out_.close();
    if (!out_) throw IoError("write failed for " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  char buf_[40];
};

}  // namespace detail

/// `x,y,z,phi,Ax,Ay,Az`, one row per node, z fastest.
inline void emit_snapshot(const PotentialState& state, const std::filesystem::path& path) {
  const Grid3& g = state.grid();
  detail::CsvWriter w(path);
  w.header("x,y,z,phi,Ax,Ay,Az");
  for (int i = 0; i < g.counts[0]; ++i)
    for (int j = 0; j < g.counts[1]; ++j)
      for (int k = 0; k < g.counts[2]; ++k) {
        const std::size_t n = g.index(i, j, k);
        const Vec3 x = g.position(i, j, k);
        const Vec3 A = state.current.A.at(n);
        w.row({x[0], x[1], x[2], state.current.phi.values[n], A[0], A[1], A[2]});
      }
  w.close();
}

/// `x,y,z,Fx,Fy,Fz,Gx,Gy,Gz`, z fastest.
inline void emit_fields(const FieldPair& f, const std::filesystem::path& path) {
  const Grid3& g = f.F.grid();
  detail::CsvWriter w(path);
  w.header("x,y,z,Fx,Fy,Fz,Gx,Gy,Gz");
  for (int i = 0; i < g.counts[0]; ++i)
    for (int j = 0; j < g.counts[1]; ++j)
      for (int k = 0; k < g.counts[2]; ++k) {
        const std::size_t n = g.index(i, j, k);
        const Vec3 x = g.position(i, j, k);
        const Vec3 F = f.F.at(n), G = f.G.at(n);
        w.row({x[0], x[1], x[2], F[0], F[1], F[2], G[0], G[1], G[2]});
      }
  w.close();
}

inline void emit_energy(const std::vector<EnergyRow>& rows, const std::filesystem::path& path) {
  detail::CsvWriter w(path);
  w.header("t,total_W,surface_flux,work_on_source");
  for (const EnergyRow& r : rows) w.row({r.t, r.total_W, r.surface_flux, r.work_on_source});
  w.close();
}

/// Generic numeric table with a caller-supplied header.
inline void emit_table(const char* header, const std::vector<std::vector<double>>& rows,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << header << '\n';
  char buf[40];
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", r[c]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

inline void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

/// Lists every artifact of a run; files the run did not finish are marked
/// partial.
struct Manifest {
  std::string subcommand;
  std::vector<std::pair<std::string, bool>> files;  ///< name, complete
  std::string status = "incomplete";
  std::string error;

  void add(const std::string& name, bool complete = true) { files.emplace_back(name, complete); }

  std::string text() const {
    std::string out = "subcommand " + subcommand + "\nstatus " + status + "\n";
    if (!error.empty()) out += "error " + error + "\n";
    for (const auto& [name, complete] : files)
      out += std::string(complete ? "complete " : "partial ") + name + "\n";
    return out;
  }
};

}  // namespace vecgrav
