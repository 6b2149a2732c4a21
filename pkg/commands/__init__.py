"""commands package"""
