#include "adaptfv/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace adaptfv
{

namespace
{

int initial_threads()
{
  if (const char *env = std::getenv("ADAPTFV_THREADS"))
  {
    const int n = std::atoi(env);
    if (n > 0)
    {
      return n;
    }
  }
  return 1;
}

std::atomic<int> &thread_setting()
{
  static std::atomic<int> n{initial_threads()};
  return n;
}

}  // namespace

int num_threads()
{
  return thread_setting().load();
}

void set_num_threads(int n)
{
  thread_setting().store(std::max(1, n));
}

void parallel_for(int n, const std::function<void(int)> &body)
{
  const int workers = std::min(num_threads(), n);
  if (workers <= 1)
  {
    for (int i = 0; i < n; i++)
    {
      body(i);
    }
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
    {
      try
      {
        body(i);
      }
      catch (...)
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure)
        {
          failure = std::current_exception();
        }
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; t++)
  {
    pool.emplace_back(run);
  }
  run();
  for (auto &t : pool)
  {
    t.join();
  }
  if (failure)
  {
    std::rethrow_exception(failure);
  }
}

}  // namespace adaptfv
