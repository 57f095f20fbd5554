#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <vector>

#include "chainfleet/ledger/types.hpp"

namespace chainfleet::ledger {

/// FIFO batching for one channel.
///
/// A block is cut when the queue holds batch_size transactions (at the
/// submit time of the batch_size-th one) or when the oldest queued
/// transaction has waited batch_timeout (at exactly that instant). Cut times
/// are event times, not the time cut() happens to be called, so a late call
/// produces the same blocks as a punctual one. A timeout expiring at T is
/// acted on once now > T, after every arrival stamped T has been enqueued;
/// arrivals at T belong to that block, and if they complete a batch the size
/// trigger wins the tie.
class Orderer {
 public:
  Orderer(std::string channel, std::size_t batch_size, Millis batch_timeout, const Block& genesis);

  void enqueue(Transaction tx);

  // Cuts every block whose trigger has fired by now, in order.
  std::vector<Block> cut(Millis now);

  std::size_t queue_length() const { return queue_.size(); }
  std::size_t max_queue_length() const { return max_queue_; }
  const std::deque<Transaction>& queue() const { return queue_; }

 private:
  Block make_block(std::size_t count, Millis cut_time);

  std::string channel_;
  std::size_t batch_size_;
  Millis batch_timeout_;
  std::uint64_t next_number_;
  Digest prev_hash_;
  Millis last_cut_{0};
  std::deque<Transaction> queue_;
  std::size_t max_queue_ = 0;
};

}  // namespace chainfleet::ledger
