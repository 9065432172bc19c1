#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "provkit/database.hpp"
#include "provkit/errors.hpp"
#include "provkit/id_database.hpp"
#include "provkit/prov_graph.hpp"

namespace provkit {

/// Exclusive project lock backed by an O_EXCL-created lock file; released on
/// destruction. Guards against two processes mutating the same project.
class ProjectLock {
public:
    ProjectLock() = default;

    explicit ProjectLock(std::filesystem::path path) : path_(std::move(path)) {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw UserError("project is locked: another process holds " + path_.string() +
                            " (remove it if stale)");
    }

    ProjectLock(ProjectLock&& other) noexcept : fd_(other.fd_), path_(std::move(other.path_)) {
        other.fd_ = -1;
    }
    ProjectLock& operator=(ProjectLock&& other) noexcept {
        if (this != &other) {
            release();
            fd_ = other.fd_;
            path_ = std::move(other.path_);
            other.fd_ = -1;
        }
        return *this;
    }
    ProjectLock(const ProjectLock&) = delete;
    ProjectLock& operator=(const ProjectLock&) = delete;

    ~ProjectLock() { release(); }

    void release() {
        if (fd_ < 0) return;
        ::close(fd_);
        std::error_code ec;
        std::filesystem::remove(path_, ec); // best effort
        fd_ = -1;
    }

private:
    int fd_ = -1;
    std::filesystem::path path_;
};

/// A project directory holds the versioned database, the workflow graph and
/// the id database as JSON files plus a manifest. Open projects hold the
/// lock; saves are atomic (write to a temp file, then rename).
class Project {
public:
    static constexpr int format_version = 1;

    static Project init(const std::filesystem::path& dir) {
        std::filesystem::create_directories(dir);
        if (std::filesystem::exists(dir / "manifest.json"))
            throw UserError("project already initialized at " + dir.string());
        Project project;
        project.dir_ = dir;
        project.lock_ = ProjectLock(dir / ".lock");
        project.save();
        return project;
    }

    static Project open(const std::filesystem::path& dir) {
        if (!std::filesystem::exists(dir / "manifest.json"))
            throw UserError("not a project directory: missing " + (dir / "manifest.json").string());
        Project project;
        project.dir_ = dir;
        project.lock_ = ProjectLock(dir / ".lock");
        nlohmann::json manifest = read_json(dir / "manifest.json");
        int version = manifest.value("format_version", -1);
        if (version != format_version)
            throw UserError("unsupported project format version " + std::to_string(version));
        project.db_ = VersionedDatabase::from_json(read_json(dir / "database.json"));
        project.graph_ = ProvGraph::from_json(read_json(dir / "prov_graph.json"));
        project.ids_ = IdDatabase::from_json(read_json(dir / "id_database.json"));
        return project;
    }

    Project(Project&&) = default;
    Project& operator=(Project&&) = default;

    const std::filesystem::path& dir() const { return dir_; }
    VersionedDatabase& database() { return db_; }
    const VersionedDatabase& database() const { return db_; }
    ProvGraph& graph() { return graph_; }
    const ProvGraph& graph() const { return graph_; }
    IdDatabase& id_database() { return ids_; }
    const IdDatabase& id_database() const { return ids_; }

    void save() const {
        nlohmann::ordered_json manifest;
        manifest["format_version"] = format_version;
        manifest["tool"] = "provkit";
        write_atomic(dir_ / "manifest.json", manifest);
        write_atomic(dir_ / "database.json", db_.to_json());
        write_atomic(dir_ / "prov_graph.json", graph_.to_json());
        write_atomic(dir_ / "id_database.json", ids_.to_json());
    }

    static nlohmann::json read_json(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw UserError("cannot read '" + path.string() + "'");
        try {
            return nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw UserError("malformed JSON in '" + path.string() + "': " + e.what());
        }
    }

    static void write_atomic(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
        std::filesystem::path tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            if (!out) throw UserError("cannot write '" + tmp.string() + "'");
            out << doc.dump(2) << "\n";
            if (!out) throw UserError("cannot write '" + tmp.string() + "'");
        }
        std::filesystem::rename(tmp, path);
    }

private:
    Project() = default;

    std::filesystem::path dir_;
    ProjectLock lock_;
    VersionedDatabase db_;
    ProvGraph graph_;
    IdDatabase ids_;
};

} // namespace provkit
