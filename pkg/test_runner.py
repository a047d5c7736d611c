#!/usr/bin/env python3
"""
Test runner for the pybrex test suite.
Runs the test categories by marker and prints a summary table.
"""
import argparse
import json
import subprocess
import sys
import time
from typing import Dict, List


class TestRunner:
    """Runs pytest once per test category."""

    def __init__(self, verbose: bool = False, run_slow: bool = False):
        self.verbose = verbose
        self.run_slow = run_slow
        self.test_results = {}
        self.start_time = None
        self.end_time = None

        self.test_categories = {
            'unit': {
                'description': 'Generators, penalties, solvers, certificates and the harness',
                'paths': ['tests/unit/', 'tests/test_configmanager.py'],
                'timeout': 600,
            },
            'property': {
                'description': 'Property-based tests using Hypothesis',
                'paths': ['tests/property/'],
                'timeout': 900,
            },
            'integration': {
                'description': 'CLI workflows on the demo configurations and acceptance checks',
                'paths': ['tests/integration/'],
                'timeout': 3600,
            },
            'performance': {
                'description': 'Timing of enumeration, brute force and certify/verify',
                'paths': ['tests/performance/'],
                'timeout': 1800,
            },
        }

    def run_category(self, category: str, extra_args: List[str] = None) -> Dict:
        if category not in self.test_categories:
            raise ValueError(f"Unknown test category: {category}")
        config = self.test_categories[category]

        print(f"\n{'=' * 80}")
        print(f"Running {category.upper()} TESTS")
        print(f"Description: {config['description']}")
        print(f"{'=' * 80}")

        cmd = [sys.executable, '-m', 'pytest', '-v', '--tb=short', '--cov-append']
        if self.run_slow:
            cmd.append('--run-slow')
        cmd.extend(config['paths'])
        cmd.extend(extra_args or [])
        if self.verbose:
            cmd.append('-s')

        start = time.time()
        try:
            result = subprocess.run(cmd, capture_output=True, text=True, timeout=config['timeout'])
        except subprocess.TimeoutExpired:
            print(f"\n{category.upper()} TESTS TIMED OUT after {config['timeout']} seconds")
            return {'category': category, 'success': False, 'duration': config['timeout'], 'error': 'timeout'}

        test_result = {
            'category': category,
            'success': result.returncode == 0,
            'duration': time.time() - start,
            'stdout': result.stdout,
            'stderr': result.stderr,
            'command': ' '.join(cmd),
        }
        self._parse_test_output(test_result)

        print(f"Status: {'PASSED' if test_result['success'] else 'FAILED'}")
        print(f"Duration: {test_result['duration']:.2f} seconds")
        print(f"Passed: {test_result.get('passed', '?')}, failed: {test_result.get('failed', '?')}, "
              f"skipped: {test_result.get('skipped', '?')}")
        if not test_result['success'] and self.verbose:
            print(f"\nSTDOUT:\n{result.stdout}")
            print(f"\nSTDERR:\n{result.stderr}")
        return test_result

    def _parse_test_output(self, result: Dict):
        """Pull the counts out of the pytest summary line ("=== 5 passed, 2 skipped in 1.2s ===")."""
        for line in result.get('stdout', '').splitlines():
            if '===' in line and ('passed' in line or 'failed' in line):
                counts = {'passed': 0, 'failed': 0, 'errors': 0, 'skipped': 0}
                parts = line.replace(',', ' ').split()
                for i, part in enumerate(parts[:-1]):
                    if part.isdigit():
                        status = parts[i + 1]
                        key = 'errors' if status.startswith('error') else status
                        if key in counts:
                            counts[key] = int(part)
                result.update(counts)
                result['tests_run'] = counts['passed'] + counts['failed'] + counts['errors']
                break

    def run_all(self, categories: List[str] = None, extra_args: List[str] = None) -> Dict:
        categories = categories or list(self.test_categories)
        print(f"pybrex test suite: {', '.join(categories)}")
        self.start_time = time.time()
        for category in categories:
            try:
                self.test_results[category] = self.run_category(category, extra_args)
            except KeyboardInterrupt:
                print("\nTest execution interrupted by user")
                break
        self.end_time = time.time()
        return self.test_results

    def summary(self) -> bool:
        print(f"\n{'=' * 80}")
        print(f"{'Category':<15} {'Status':<10} {'Duration':<12} {'Pass':<6} {'Fail':<6} {'Skip':<6}")
        print(f"{'-' * 60}")
        ok = True
        for category, result in self.test_results.items():
            status = "PASSED" if result.get('success') else "FAILED"
            ok = ok and result.get('success', False)
            print(f"{category:<15} {status:<10} {result.get('duration', 0):<12.1f} "
                  f"{result.get('passed', '?'):<6} {result.get('failed', '?'):<6} {result.get('skipped', '?'):<6}")
        print(f"Total duration: {self.end_time - self.start_time:.1f}s")
        return ok

    def generate_report(self, output_file: str):
        report = {
            'timestamp': time.strftime('%Y-%m-%d %H:%M:%S'),
            'total_duration': self.end_time - self.start_time,
            'categories': {k: {kk: vv for kk, vv in v.items() if kk not in ('stdout', 'stderr')}
                           for k, v in self.test_results.items()},
        }
        with open(output_file, 'w') as f:
            json.dump(report, f, indent=2)
        print(f"Report saved to: {output_file}")


def main():
    parser = argparse.ArgumentParser(description="Run the pybrex test suite by category")
    parser.add_argument('categories', nargs='*', help="unit, property, integration, performance (default: all)")
    parser.add_argument('--run-slow', action='store_true', help="include the slow acceptance and timing tests")
    parser.add_argument('--report', help="write a JSON report to this file")
    parser.add_argument('-v', '--verbose', action='store_true')
    args, extra = parser.parse_known_args()

    runner = TestRunner(verbose=args.verbose, run_slow=args.run_slow)
    runner.run_all(args.categories or None, extra)
    ok = runner.summary()
    if args.report:
        runner.generate_report(args.report)
    sys.exit(0 if ok else 1)


if __name__ == '__main__':
    main()
