"""Tests for the news weak supervision package"""
