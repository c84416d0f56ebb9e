#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>

namespace dsea::transport {

enum class LinkStatus { delivered, shutdown };

/// Bounded, in-order, lossless single-producer/single-consumer channel.
///
/// `send` moves the value in; afterwards the sender no longer owns it. Both
/// ends block on full/empty. Closing the link wakes everyone: pending sends
/// report `shutdown`, receivers drain what is queued and then see nullopt.
template <typename T>
class Link {
public:
    explicit Link(std::size_t capacity = 1) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("link capacity must be positive");
    }

    Link(const Link&) = delete;
    Link& operator=(const Link&) = delete;

    LinkStatus send(T&& value) {
        std::unique_lock lock(mutex_);
        not_full_.wait(lock, [&] { return closed_ || queue_.size() < capacity_; });
        if (closed_) return LinkStatus::shutdown;
        queue_.push_back(std::move(value));
        not_empty_.notify_one();
        return LinkStatus::delivered;
    }

    /// Non-blocking send; on failure `value` is left untouched.
    bool try_send(T& value) {
        std::lock_guard lock(mutex_);
        if (closed_ || queue_.size() >= capacity_) return false;
        queue_.push_back(std::move(value));
        not_empty_.notify_one();
        return true;
    }

    std::optional<T> receive() {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return closed_ || !queue_.empty(); });
        return pop_locked();
    }

    std::optional<T> try_receive() {
        std::lock_guard lock(mutex_);
        return pop_locked();
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_full_.notify_all();
        not_empty_.notify_all();
    }

    bool closed() const {
        std::lock_guard lock(mutex_);
        return closed_;
    }

    bool full() const {
        std::lock_guard lock(mutex_);
        return queue_.size() >= capacity_;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return queue_.size();
    }

    std::size_t capacity() const noexcept { return capacity_; }

private:
    std::optional<T> pop_locked() {
        if (queue_.empty()) return std::nullopt;
        T out = std::move(queue_.front());
        queue_.pop_front();
        not_full_.notify_one();
        return out;
    }

    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::condition_variable not_full_;
    std::condition_variable not_empty_;
    std::deque<T> queue_;
    bool closed_ = false;
};

} // namespace dsea::transport
