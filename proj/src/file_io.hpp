// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "datacase/status.hpp"

namespace datacase {

// Thin RAII wrapper over a POSIX fd. Appends go through pwrite at the
// tracked size so concurrent positioned reads stay race-free.
class RandomAccessFile {
 public:
  RandomAccessFile() = default;
  ~RandomAccessFile() { close(); }
  RandomAccessFile(const RandomAccessFile&) = delete;
  RandomAccessFile& operator=(const RandomAccessFile&) = delete;
  RandomAccessFile(RandomAccessFile&& o) noexcept { *this = std::move(o); }
  RandomAccessFile& operator=(RandomAccessFile&& o) noexcept {
    if (this != &o) {
      close();
      fd_ = o.fd_;
      size_ = o.size_;
      path_ = std::move(o.path_);
      o.fd_ = -1;
      o.size_ = 0;
    }
    return *this;
  }

  Status open(const std::filesystem::path& path, bool create) {
    close();
    int flags = O_RDWR | (create ? O_CREAT : 0);
    fd_ = ::open(path.c_str(), flags, 0644);
    if (fd_ < 0) return Status(Code::kIoError, "open failed: " + path.string());
    struct stat st{};
    if (::fstat(fd_, &st) != 0) return Status(Code::kIoError, "fstat failed: " + path.string());
    size_ = static_cast<std::uint64_t>(st.st_size);
    path_ = path.string();
    return Status::ok();
  }

  void close() {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
    size_ = 0;
  }

  bool is_open() const { return fd_ >= 0; }
  std::uint64_t size() const { return size_; }
  const std::string& path() const { return path_; }

  Status append(std::span<const std::uint8_t> data, std::uint64_t* offset = nullptr) {
    const std::uint64_t at = size_;
    if (offset) *offset = at;
    return write_at(at, data);  // write_at maintains size_
  }

  Status write_at(std::uint64_t off, std::span<const std::uint8_t> data) {
    size_t done = 0;
    while (done < data.size()) {
      ssize_t n = ::pwrite(fd_, data.data() + done, data.size() - done,
                           static_cast<off_t>(off + done));
      if (n <= 0) return Status(Code::kIoError, "pwrite failed: " + path_);
      done += static_cast<size_t>(n);
    }
    if (off + data.size() > size_) size_ = off + data.size();
    return Status::ok();
  }

  Status truncate(std::uint64_t new_size) {
    if (::ftruncate(fd_, static_cast<off_t>(new_size)) != 0) {
      return Status(Code::kIoError, "ftruncate failed: " + path_);
    }
    size_ = new_size;
    return Status::ok();
  }

  Status read_at(std::uint64_t off, std::span<std::uint8_t> out) const {
    size_t done = 0;
    while (done < out.size()) {
      ssize_t n = ::pread(fd_, out.data() + done, out.size() - done,
                          static_cast<off_t>(off + done));
      if (n <= 0) return Status(Code::kIoError, "pread failed: " + path_);
      done += static_cast<size_t>(n);
    }
    return Status::ok();
  }

  void sync() {
    if (fd_ >= 0) ::fdatasync(fd_);
  }

 private:
  int fd_ = -1;
  std::uint64_t size_ = 0;
  std::string path_;
};

// Advisory exclusive lock on <dir>/.lock, released on destruction or
// process exit. Fails fast when another holder exists.
class DirLock {
 public:
  DirLock() = default;
  ~DirLock() { release(); }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

  Status acquire(const std::filesystem::path& dir) {
    release();
    fd_ = ::open((dir / ".lock").c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) return Status(Code::kIoError, "cannot create lock file in " + dir.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fd_ = -1;
      return Status(Code::kLockHeld, "store is locked by another process: " + dir.string());
    }
    return Status::ok();
  }

  void release() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_ = -1;
};

inline Status write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  std::error_code ignored;
  std::filesystem::remove(tmp, ignored);
  {
    RandomAccessFile f;
    Status st = f.open(tmp, /*create=*/true);
    if (!st.is_ok()) return st;
    st = f.write_at(0, std::span<const std::uint8_t>(
                           reinterpret_cast<const std::uint8_t*>(content.data()), content.size()));
    if (!st.is_ok()) return st;
    f.sync();
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) return Status(Code::kIoError, "rename failed for " + path.string());
  return Status::ok();
}

}  // namespace datacase
